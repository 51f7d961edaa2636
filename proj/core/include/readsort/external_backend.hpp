#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace readsort {

enum class BackendKind { Builtin, External };

/// How the final FASTQ is compressed. External templates are shell commands
/// with `{in}` and `{out}` placeholders, e.g. "xz -9 -c {in} > {out}".
struct BackendSpec {
  BackendKind kind = BackendKind::Builtin;
  std::string command_template;
  std::string decompress_template;

  static BackendSpec builtin() { return {}; }
  static BackendSpec external(std::string compress, std::string decompress);
  /// Accepts a full template, or the bare name of a known tool (gzip, bzip2,
  /// xz, zstd) which expands to its usual compress/decompress pair.
  static BackendSpec from_command(const std::string& cmd);

  /// Raises InvalidConfig when an external template misses a placeholder.
  void validate() const;
};

/// Substitutes shell-quoted paths for every `{in}` and `{out}`.
std::string expand_template(std::string_view tmpl, const std::filesystem::path& in,
                            const std::filesystem::path& out);

/// First word of a command template (the program that will run).
std::string command_program(std::string_view tmpl);

/// Runs the compress template; returns the size of the produced file.
/// Raises ToolMissing when the program cannot be found, ToolFailed with the
/// captured stderr on a nonzero exit.
std::uint64_t external_compress(const BackendSpec& spec, const std::filesystem::path& in,
                                const std::filesystem::path& out);
void external_decompress(const BackendSpec& spec, const std::filesystem::path& in, const std::filesystem::path& out);

}  // namespace readsort
