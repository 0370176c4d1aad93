#include "dualrep/cli.h"

int main(int argc, char** argv) { return dualrep::cli::run(argc, argv); }
