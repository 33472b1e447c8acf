#include "mfrmab/cli.hpp"

int main(int argc, char** argv) { return mfrmab::cli_main(argc, argv); }
