#include "readsort/external_backend.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "readsort/error.hpp"

namespace readsort {

namespace fs = std::filesystem;

namespace {

struct KnownTool {
  std::string_view name;
  std::string_view compress;
  std::string_view decompress;
};

constexpr KnownTool kKnownTools[] = {
    {"gzip", "gzip -9 -c {in} > {out}", "gzip -d -c {in} > {out}"},
    {"bzip2", "bzip2 -9 -c {in} > {out}", "bzip2 -d -c {in} > {out}"},
    {"xz", "xz -9 -c {in} > {out}", "xz -d -c {in} > {out}"},
    {"zstd", "zstd -q -19 -c {in} > {out}", "zstd -q -d -c {in} > {out}"},
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  out += '\'';
  return out;
}

bool program_exists(const std::string& program) {
  if (program.empty()) return false;
  if (program.find('/') != std::string::npos) return ::access(program.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (path == nullptr) return false;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) dir = ".";
    if (::access((fs::path(dir) / program).c_str(), X_OK) == 0) return true;
  }
  return false;
}

std::string read_text(const fs::path& p, std::size_t limit = 4096) {
  std::ifstream in(p, std::ios::binary);
  std::string s(limit, '\0');
  in.read(s.data(), static_cast<std::streamsize>(limit));
  s.resize(static_cast<std::size_t>(in.gcount()));
  return s;
}

void run(std::string_view tmpl, const fs::path& in, const fs::path& out) {
  const std::string program = command_program(tmpl);
  if (!program_exists(program)) throw Error(ErrorCode::ToolMissing, "command not found: " + program);

  fs::path err = out;
  err += ".stderr";
  const std::string cmd = "( " + expand_template(tmpl, in, out) + " ) 2> " + shell_quote(err.string());
  const int status = std::system(cmd.c_str());
  std::string diagnostics = read_text(err);
  std::error_code ec;
  fs::remove(err, ec);
  if (status == -1) throw Error(ErrorCode::ToolFailed, "could not start shell for: " + program);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (code == 127) throw Error(ErrorCode::ToolMissing, "command not found: " + program);
  if (code != 0) {
    while (!diagnostics.empty() && (diagnostics.back() == '\n' || diagnostics.back() == ' ')) diagnostics.pop_back();
    throw Error(ErrorCode::ToolFailed,
                program + " exited with status " + std::to_string(code) + (diagnostics.empty() ? "" : ": " + diagnostics));
  }
  if (!fs::exists(out)) throw Error(ErrorCode::ToolFailed, program + " did not produce " + out.string());
}

}  // namespace

BackendSpec BackendSpec::external(std::string compress, std::string decompress) {
  BackendSpec spec;
  spec.kind = BackendKind::External;
  spec.command_template = std::move(compress);
  spec.decompress_template = std::move(decompress);
  return spec;
}

BackendSpec BackendSpec::from_command(const std::string& cmd) {
  for (const auto& tool : kKnownTools)
    if (cmd == tool.name) return external(std::string(tool.compress), std::string(tool.decompress));
  return external(cmd, cmd);
}

void BackendSpec::validate() const {
  if (kind == BackendKind::Builtin) return;
  for (const std::string* t : {&command_template, &decompress_template}) {
    if (t->find("{in}") == std::string::npos || t->find("{out}") == std::string::npos)
      throw Error(ErrorCode::InvalidConfig, "external command template needs both {in} and {out}: '" + *t + "'");
  }
}

std::string expand_template(std::string_view tmpl, const fs::path& in, const fs::path& out) {
  std::string result;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.substr(i, 4) == "{in}") {
      result += shell_quote(in.string());
      i += 4;
    } else if (tmpl.substr(i, 5) == "{out}") {
      result += shell_quote(out.string());
      i += 5;
    } else {
      result += tmpl[i++];
    }
  }
  return result;
}

std::string command_program(std::string_view tmpl) {
  const auto begin = tmpl.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  const auto end = tmpl.find_first_of(" \t", begin);
  return std::string(tmpl.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
}

std::uint64_t external_compress(const BackendSpec& spec, const fs::path& in, const fs::path& out) {
  spec.validate();
  run(spec.command_template, in, out);
  return fs::file_size(out);
}

void external_decompress(const BackendSpec& spec, const fs::path& in, const fs::path& out) {
  spec.validate();
  run(spec.decompress_template, in, out);
}

}  // namespace readsort
