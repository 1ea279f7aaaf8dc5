#include "sabc/cli.hpp"

int main(int argc, char** argv) { return sabc::run_cli(argc, argv); }
