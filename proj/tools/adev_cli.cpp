#include "adev/cli.hpp"

int main(int argc, char** argv) { return adev::run_cli(argc, argv); }
