#include "sparsefw/cli.hpp"

int main(int argc, char** argv) { return sparsefw::run_cli(argc, argv); }
