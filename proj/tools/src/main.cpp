#include "ehaloha/cli.hpp"

int main(int argc, char** argv) { return ehaloha::run_cli(argc, argv); }
