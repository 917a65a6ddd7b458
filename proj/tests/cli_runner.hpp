// Runs the alignkit executable in a scratch directory.
#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace clirun {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Scratch {
 public:
  explicit Scratch(const std::string& tag) {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("alignkit_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;

  fs::path path(const std::string& name) const { return dir_ / name; }
  std::string str(const std::string& name) const { return path(name).string(); }

  /// Runs `alignkit <args>` with stdout/stderr captured to files; returns the exit code.
  int run(const std::string& args) {
    const std::string cmd = std::string("'") + ALIGNKIT_CLI_PATH + "' " + args + " >'" + str("stdout") +
                            "' 2>'" + str("stderr") + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out() const { return read_file(path("stdout")); }
  std::string err() const { return read_file(path("stderr")); }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name), std::ios::binary) << content;
  }

 private:
  fs::path dir_;
};

}  // namespace clirun
