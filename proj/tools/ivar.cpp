#include "ivar/cli.hpp"

int main(int argc, char** argv) { return ivar::run_cli(argc, argv); }
