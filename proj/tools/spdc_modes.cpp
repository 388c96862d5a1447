#include "spdc/cli.hpp"

int main(int argc, char** argv) { return spdc::run_command(argc, argv); }
