#include "spinnet/cli.hpp"

int main(int argc, char** argv) {
  return spinnet::cli_dispatch({argv + 1, argv + argc});
}
