// Batch front end; command dispatch is filled in as modules land.
#include "coneflow/common.hpp"

#include <cstdio>

int main() {
  std::puts("coneflow: commands not wired yet");
  return 1;
}
