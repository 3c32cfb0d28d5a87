// Copyright 2026 The tcnse Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TCNSE_TESTS_CLI_UTIL_H_
#define TCNSE_TESTS_CLI_UTIL_H_

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace tcnse::testing {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
  std::map<std::string, std::string> values;
};

inline CliResult RunCli(const std::string &args) {
  CliResult r;
  const std::string cmd = std::string(TCNSE_CLI_PATH) + " " + args + " 2>&1";
  FILE *pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::istringstream lines(r.output);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) r.values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return r;
}

inline std::string ConfigPath(const std::string &name) {
  return std::string(TCNSE_CONFIG_DIR) + "/" + name;
}

inline std::string TmpFile(const std::string &name) {
  return std::string(TCNSE_TEST_TMPDIR) + "/" + name;
}

inline void WriteText(const std::string &path, const std::string &text) {
  std::ofstream(path) << text;
}

}  // namespace tcnse::testing

#endif  // TCNSE_TESTS_CLI_UTIL_H_
