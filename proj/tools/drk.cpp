#include "drk/cli.hpp"

int main(int argc, char** argv) { return drk::run_cli(argc, argv); }
