#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace cli {

struct Result {
  int code = -1;
  std::string out;
};

inline std::string data(const std::string& name) { return std::string(ORBIT_KAHLER_DATA) + "/" + name; }

// Runs the CLI with `args` (already shell-quoted), capturing stdout; stderr is discarded.
inline Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" + ORBIT_KAHLER_CLI + "\" " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "orbit_kahler_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace cli
