#include "gcons/experiment.hpp"

int main(int argc, char** argv) { return gcons::run_cli(argc, argv); }
