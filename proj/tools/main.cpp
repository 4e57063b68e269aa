#include "lfact/cli.hpp"

int main(int argc, char** argv) { return lfact::run_cli(argc, argv); }
