#include "canonrep/cli.hpp"

int main(int argc, char** argv) { return canonrep::run_cli(argc, argv); }
