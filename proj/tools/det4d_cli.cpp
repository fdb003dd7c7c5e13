#include <cstdio>

int main() {
  std::puts("det4d: subcommands not wired up yet");
  return 2;
}
