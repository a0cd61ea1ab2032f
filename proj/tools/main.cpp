#include "spinpair/cli.hpp"

int main(int argc, char** argv) { return spinpair::run_cli(argc, argv); }
