#include <cstdlib>
#include <string>
#include <thread>

#include "slabmn/acceptance.hpp"

int main(int argc, char** argv) {
  bool slow = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--slow")
      slow = true;
  const unsigned hw = std::thread::hardware_concurrency();
  const int threads = hw > 0 ? static_cast<int>(hw) : 4;
  return slabmn::run_acceptance(slow, 12345, threads);
}
