#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "fastq_fuzz.hpp"
#include "readsort/error.hpp"
#include "readsort/external_backend.hpp"
#include "readsort/gain_report.hpp"
#include "readsort/input.hpp"

using namespace readsort;
namespace fs = std::filesystem;

namespace {

bool have(const char* prog) {
  const std::string cmd = std::string("command -v ") + prog + " >/dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("readsort-ext-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(ExternalBackend, TemplatesNeedPlaceholders) {
  EXPECT_THROW(BackendSpec::external("gzip -c {in}", "gzip -dc {in} > {out}").validate(), Error);
  EXPECT_NO_THROW(BackendSpec::from_command("xz").validate());
  EXPECT_NO_THROW(BackendSpec::builtin().validate());
  EXPECT_EQ(command_program("  xz -9 -c {in} > {out}"), "xz");
  EXPECT_EQ(expand_template("cat {in} > {out}", "a b", "c'd"), "cat 'a b' > 'c'\\''d'");
}

TEST(ExternalBackend, MissingToolNamesCommand) {
  TempDir dir;
  write_file_text(dir.path / "in.fq", "@a\nA\n+\nI\n");
  const auto spec = BackendSpec::external("no-such-tool-xyz {in} {out}", "no-such-tool-xyz -d {in} {out}");
  try {
    external_compress(spec, dir.path / "in.fq", dir.path / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ToolMissing);
    EXPECT_NE(std::string(e.what()).find("no-such-tool-xyz"), std::string::npos);
  }
}

TEST(ExternalBackend, FailingToolReportsStderr) {
  TempDir dir;
  write_file_text(dir.path / "in.fq", "@a\nA\n+\nI\n");
  const auto spec = BackendSpec::external("sh -c 'echo boom >&2; exit 3' {in} {out}", "cat {in} > {out}");
  try {
    external_compress(spec, dir.path / "in.fq", dir.path / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ToolFailed);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(ExternalBackend, SystemCompressorsRoundTrip) {
  TempDir dir;
  const std::string text = to_fastq_string(fuzz::make_file(30));
  write_file_text(dir.path / "in.fq", text);
  int ran = 0;
  for (const char* tool : {"gzip", "xz", "bzip2"}) {
    if (!have(tool)) continue;
    ++ran;
    const auto spec = BackendSpec::from_command(tool);
    const auto size = external_compress(spec, dir.path / "in.fq", dir.path / "c");
    EXPECT_EQ(size, fs::file_size(dir.path / "c"));
    external_decompress(spec, dir.path / "c", dir.path / "back.fq");
    const auto back = read_file_bytes(dir.path / "back.fq");
    EXPECT_EQ(std::string(back.begin(), back.end()), text) << tool;
  }
  if (ran == 0) GTEST_SKIP() << "no system compressor available";
}

TEST(ExternalBackend, GainReportUsesBothSizes) {
  if (!have("gzip")) GTEST_SKIP() << "gzip not available";
  TempDir dir;
  auto recs = fuzz::make_file(31);
  write_file_text(dir.path / "orig.fq", to_fastq_string(recs));
  std::reverse(recs.begin(), recs.end());
  write_file_text(dir.path / "sorted.fq", to_fastq_string(recs));
  const auto g = gain_report(dir.path / "orig.fq", dir.path / "sorted.fq", 10, BackendSpec::from_command("gzip"),
                             dir.path);
  EXPECT_GT(g.original_compressed_bytes, 0u);
  EXPECT_GT(g.sorted_compressed_bytes, 0u);
  EXPECT_EQ(g.gain_bytes, static_cast<std::int64_t>(g.original_compressed_bytes) -
                              static_cast<std::int64_t>(g.sorted_compressed_bytes));
  EXPECT_FALSE(g.sequences.has_value());
}
