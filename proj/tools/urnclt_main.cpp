#include "urnclt/cli.hpp"

int main(int argc, char** argv) { return urnclt::run_cli(argc, argv); }
