#include "morsp/cli.hpp"

int main(int argc, char** argv) { return morsp::run_cli(argc, argv); }
