#pragma once

namespace spdc {

/// Entry point of the spdc-modes tool. Returns 0 on success and 10 + ErrorKind
/// on failure, after printing "error: <class>: <message>" to stderr.
int run_command(int argc, char** argv);

}  // namespace spdc
