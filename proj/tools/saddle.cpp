#include "saddle/cli.h"

int main(int argc, char** argv) { return saddle::run_cli(argc, argv); }
