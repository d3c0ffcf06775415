#include <array>
#include <cstdio>
#include <memory>
#include <string>

#include "l3lab/acceptance.hpp"

namespace {

struct Run {
  std::string out;
  int status = -1;
};

Run capture(const std::string& cmd) {
  Run r;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  r.status = pclose(pipe.release());
  return r;
}

}  // namespace

int main() {
  bool all = true;
  for (const auto& r : l3lab::run_acceptance()) {
    std::printf("%s\n", l3lab::format_line(r).c_str());
    all = all && r.pass;
  }

  const std::string cmd = std::string(L3LAB_TOOL) + " verify 2>/dev/null";
  const Run first = capture(cmd);
  const Run second = capture(cmd);
  std::size_t lines = 0;
  for (char c : first.out) lines += c == '\n';
  const bool same = !first.out.empty() && first.out == second.out && first.status == second.status;
  std::printf("%s 14 determinism: identical=%d bytes=%zu lines=%zu\n", same ? "PASS" : "FAIL", same ? 1 : 0,
              first.out.size(), lines);
  all = all && same;
  return all ? 0 : 1;
}
