// SPDX-License-Identifier: Apache-2.0
//
// uvaa train|eval|sweep|oracle; see `uvaa --help`.

#include "uvaa/cli.hpp"

int main(int argc, char **argv) { return uvaa::cli::main_entry(argc, argv); }
