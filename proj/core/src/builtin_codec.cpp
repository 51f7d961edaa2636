#include "readsort/builtin_codec.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <future>
#include <string_view>

#include "readsort/error.hpp"
#include "readsort/hash.hpp"
#include "readsort/range_coder.hpp"

namespace readsort {

EnsembleConfig CodecConfig::default_dna_ensemble() {
  EnsembleConfig cfg;
  // Dense order-12 table plus a hashed order-16 tolerant model with a bounded
  // table; the bounded table forgets old contexts, so read locality pays off.
  cfg.models.emplace_back(FcmConfig::make(12));
  StcmConfig stcm;
  stcm.base = FcmConfig::make(16);
  stcm.base.max_table_bits = 20;
  stcm.max_substitutions = 3;
  cfg.models.emplace_back(stcm);
  return cfg;
}

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorCode::CorruptContainer, what); }

void check(const RangeDecoder& dec, const char* stream) {
  if (dec.overrun())
    throw Error(ErrorCode::DesyncDetected, std::string(stream) + " stream decoder ran past its input");
}

// ---------------------------------------------------------------------------
// Header tokens

enum class TokenKind : std::uint8_t { Digits = 0, Alpha = 1, Other = 2 };

struct Token {
  TokenKind kind;
  std::string_view text;
};

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i + 1;
    TokenKind kind = TokenKind::Other;
    if (is_digit(s[i])) {
      kind = TokenKind::Digits;
      while (j < s.size() && is_digit(s[j])) ++j;
    } else if (is_alpha(s[i])) {
      kind = TokenKind::Alpha;
      while (j < s.size() && is_alpha(s[j])) ++j;
    }
    out.push_back(Token{kind, s.substr(i, j - i)});
    i = j;
  }
  return out;
}

/// Numeric value of a canonical decimal token (no leading zeros, <= 18 digits).
bool canonical_number(const Token& t, std::uint64_t& value) noexcept {
  if (t.kind != TokenKind::Digits || t.text.size() > 18) return false;
  if (t.text.size() > 1 && t.text.front() == '0') return false;
  std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
  return true;
}

enum Op : std::uint8_t { kMatch = 0, kDelta = 1, kLiteral = 2, kEnd = 3 };
enum SepOp : std::uint8_t { kSepPlain = 0, kSepHeader = 1, kSepLiteral = 2 };
constexpr std::size_t kTokenSlots = 64;

struct HeaderModels {
  std::array<std::array<std::array<BitCounter, 3>, 4>, kTokenSlots> op{};
  std::array<std::array<BitCounter, 2>, kTokenSlots> kind{};
  std::array<IntModel, 3> length{};
  ByteModel delta{16};
  ByteModel text{22};
  std::array<std::array<BitCounter, 2>, 3> sep{};
  IntModel sep_length;
  ByteModel sep_text{16};
  std::array<std::uint8_t, kTokenSlots> prev_op{};
  std::uint8_t prev_sep = kSepPlain;

  HeaderModels() { prev_op.fill(kLiteral); }
};

std::uint64_t text_context(std::string_view built, TokenKind kind) noexcept {
  std::uint64_t ctx = static_cast<std::uint64_t>(kind) + 1;
  const std::size_t n = std::min<std::size_t>(built.size(), 3);
  for (std::size_t i = built.size() - n; i < built.size(); ++i) ctx = (ctx << 8) | static_cast<std::uint8_t>(built[i]);
  return ctx | (std::uint64_t{n} << 40);
}

template <typename Bit>
int code_op(Bit&& bit, HeaderModels& m, std::size_t slot, int op) {
  auto& node = m.op[slot][m.prev_op[slot]];
  if (bit(node[0], op == kMatch)) return kMatch;
  if (bit(node[1], op == kEnd)) return kEnd;
  return bit(node[2], op == kLiteral) ? kLiteral : kDelta;
}

template <typename Bit>
TokenKind code_kind(Bit&& bit, HeaderModels& m, std::size_t slot, TokenKind kind) {
  if (bit(m.kind[slot][0], kind == TokenKind::Digits)) return TokenKind::Digits;
  return bit(m.kind[slot][1], kind == TokenKind::Alpha) ? TokenKind::Alpha : TokenKind::Other;
}

template <typename Bit>
int code_sep_op(Bit&& bit, HeaderModels& m, int op) {
  auto& node = m.sep[m.prev_sep];
  if (bit(node[0], op == kSepPlain)) return kSepPlain;
  return bit(node[1], op == kSepHeader) ? kSepHeader : kSepLiteral;
}

// ---------------------------------------------------------------------------
// Length of a read, coded as "same as previous" or explicitly.

struct LengthModel {
  BitCounter same;
  IntModel value;
  std::uint64_t prev = 0;

  void encode(RangeEncoder& enc, std::uint64_t len) {
    encode_bit(enc, same, len == prev);
    if (len != prev) value.encode(enc, len);
    prev = len;
  }
  std::uint64_t decode(RangeDecoder& dec) {
    if (!decode_bit(dec, same)) prev = value.decode(dec);
    return prev;
  }
};

constexpr std::uint64_t kMaxReadLength = std::uint64_t{1} << 32;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[at + i]} << (8 * i);
  return v;
}

std::uint64_t double_bits(double d) { return std::bit_cast<std::uint64_t>(d); }
double bits_double(std::uint64_t v) { return std::bit_cast<double>(v); }

void encode_fcm(RangeEncoder& enc, const FcmConfig& c) {
  enc.encode_bits(static_cast<std::uint64_t>(c.order), 5);
  enc.encode_bits(double_bits(c.alpha), 64);
  enc.encode_bits(c.hashed ? 1 : 0, 1);
  enc.encode_bits(static_cast<std::uint64_t>(c.max_table_bits), 5);
  enc.encode_bits(c.max_count, 16);
}

FcmConfig decode_fcm(RangeDecoder& dec) {
  FcmConfig c;
  c.order = static_cast<int>(dec.decode_bits(5));
  c.alpha = bits_double(dec.decode_bits(64));
  c.hashed = dec.decode_bits(1) != 0;
  c.max_table_bits = static_cast<int>(dec.decode_bits(5));
  c.max_count = static_cast<std::uint32_t>(dec.decode_bits(16));
  return c;
}

void encode_ensemble_config(RangeEncoder& enc, const EnsembleConfig& cfg) {
  enc.encode_bits(cfg.models.size(), 8);
  enc.encode_bits(double_bits(cfg.gamma), 64);
  for (const auto& m : cfg.models) {
    if (const auto* f = std::get_if<FcmConfig>(&m)) {
      enc.encode_bits(0, 1);
      encode_fcm(enc, *f);
    } else {
      const auto& s = std::get<StcmConfig>(m);
      enc.encode_bits(1, 1);
      encode_fcm(enc, s.base);
      enc.encode_bits(static_cast<std::uint64_t>(s.max_substitutions), 8);
      enc.encode_bits(double_bits(s.fallback_alpha), 64);
    }
  }
}

EnsembleConfig decode_ensemble_config(RangeDecoder& dec) {
  EnsembleConfig cfg;
  const auto count = dec.decode_bits(8);
  cfg.gamma = bits_double(dec.decode_bits(64));
  for (std::uint64_t i = 0; i < count; ++i) {
    if (dec.decode_bits(1) == 0) {
      cfg.models.emplace_back(decode_fcm(dec));
    } else {
      StcmConfig s;
      s.base = decode_fcm(dec);
      s.max_substitutions = static_cast<int>(dec.decode_bits(8));
      s.fallback_alpha = bits_double(dec.decode_bits(64));
      cfg.models.emplace_back(s);
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    corrupt(std::string("invalid DNA model description: ") + e.what());
  }
  return cfg;
}

}  // namespace

// ---------------------------------------------------------------------------
// Headers

std::vector<std::uint8_t> encode_header_stream(std::span<const FastqRecord> records) {
  if (records.empty()) return {};
  RangeEncoder enc;
  IntModel count;
  count.encode(enc, records.size());
  auto m = std::make_unique<HeaderModels>();
  auto bit = [&enc](BitCounter& c, bool b) {
    encode_bit(enc, c, b ? 1 : 0);
    return b;
  };

  std::string prev_body;
  for (const auto& rec : records) {
    const std::string_view body = std::string_view(rec.header).substr(1);
    const auto prev_tokens = tokenize(prev_body);
    const auto tokens = tokenize(body);
    std::string_view built = body.substr(0, 0);
    for (std::size_t i = 0; i <= tokens.size(); ++i) {
      const std::size_t slot = std::min(i, kTokenSlots - 1);
      int op = kEnd;
      std::uint64_t delta = 0;
      if (i < tokens.size()) {
        const Token& t = tokens[i];
        op = kLiteral;
        if (i < prev_tokens.size()) {
          const Token& p = prev_tokens[i];
          std::uint64_t cur_v = 0;
          std::uint64_t prev_v = 0;
          if (p.kind == t.kind && p.text == t.text) {
            op = kMatch;
          } else if (canonical_number(t, cur_v) && canonical_number(p, prev_v) && cur_v > prev_v &&
                     cur_v - prev_v <= 256) {
            op = kDelta;
            delta = cur_v - prev_v;
          }
        }
      }
      code_op(bit, *m, slot, op);
      m->prev_op[slot] = static_cast<std::uint8_t>(op);
      if (op == kEnd) break;
      const Token& t = tokens[i];
      if (op == kDelta) {
        m->delta.encode(enc, slot, static_cast<std::uint8_t>(delta - 1));
      } else if (op == kLiteral) {
        code_kind(bit, *m, slot, t.kind);
        if (t.kind != TokenKind::Other) m->length[static_cast<int>(t.kind)].encode(enc, t.text.size() - 1);
        for (std::size_t k = 0; k < t.text.size(); ++k) {
          const std::string_view so_far = body.substr(0, static_cast<std::size_t>(t.text.data() - body.data()) + k);
          m->text.encode(enc, text_context(so_far, t.kind), static_cast<std::uint8_t>(t.text[k]));
        }
      }
      built = body.substr(0, built.size() + t.text.size());
    }

    const std::string_view sep = std::string_view(rec.separator).substr(1);
    const int sop = sep.empty() ? kSepPlain : (sep == body ? kSepHeader : kSepLiteral);
    code_sep_op(bit, *m, sop);
    m->prev_sep = static_cast<std::uint8_t>(sop);
    if (sop == kSepLiteral) {
      m->sep_length.encode(enc, sep.size());
      std::uint8_t last = 0;
      for (char c : sep) {
        m->sep_text.encode(enc, last, static_cast<std::uint8_t>(c));
        last = static_cast<std::uint8_t>(c);
      }
    }
    prev_body.assign(body);
  }
  return enc.finish();
}

HeaderChannel decode_header_stream(std::span<const std::uint8_t> bytes) {
  HeaderChannel out;
  if (bytes.empty()) return out;
  RangeDecoder dec(bytes);
  IntModel count;
  const std::uint64_t n = count.decode(dec);
  if (n > bytes.size() * 64 + 64) corrupt("header stream: implausible record count");
  auto m = std::make_unique<HeaderModels>();
  auto bit = [&dec](BitCounter& c, bool) { return decode_bit(dec, c) != 0; };

  std::string prev_body;
  out.headers.reserve(n);
  out.separators.reserve(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    const auto prev_tokens = tokenize(prev_body);
    std::string body;
    for (std::size_t i = 0;; ++i) {
      const std::size_t slot = std::min(i, kTokenSlots - 1);
      const int op = code_op(bit, *m, slot, 0);
      m->prev_op[slot] = static_cast<std::uint8_t>(op);
      if (op == kEnd) break;
      if (op == kMatch || op == kDelta) {
        if (i >= prev_tokens.size()) corrupt("header stream: reference to a missing token");
        const Token& p = prev_tokens[i];
        if (op == kMatch) {
          body.append(p.text);
        } else {
          std::uint64_t prev_v = 0;
          if (!canonical_number(p, prev_v)) corrupt("header stream: delta on a non-numeric token");
          body.append(std::to_string(prev_v + m->delta.decode(dec, slot) + 1));
        }
      } else {
        const TokenKind kind = code_kind(bit, *m, slot, TokenKind::Other);
        std::uint64_t len = 1;
        if (kind != TokenKind::Other) len = m->length[static_cast<int>(kind)].decode(dec) + 1;
        if (len > (std::uint64_t{1} << 32)) corrupt("header stream: implausible token length");
        for (std::uint64_t k = 0; k < len; ++k)
          body.push_back(static_cast<char>(m->text.decode(dec, text_context(body, kind))));
      }
      check(dec, "header");
    }

    const int sop = code_sep_op(bit, *m, 0);
    m->prev_sep = static_cast<std::uint8_t>(sop);
    std::string sep = "+";
    if (sop == kSepHeader) {
      sep.append(body);
    } else if (sop == kSepLiteral) {
      const std::uint64_t len = m->sep_length.decode(dec);
      if (len > (std::uint64_t{1} << 32)) corrupt("header stream: implausible separator length");
      std::uint8_t last = 0;
      for (std::uint64_t k = 0; k < len; ++k) {
        last = m->sep_text.decode(dec, last);
        sep.push_back(static_cast<char>(last));
      }
    }
    check(dec, "header");
    out.headers.push_back("@" + body);
    out.separators.push_back(std::move(sep));
    prev_body = std::move(body);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sequences

namespace {

struct SequenceSideModels {
  LengthModel length;
  BitCounter has_exceptions;
  std::array<BitCounter, 2> is_exception{};
  ByteModel exception_byte{12};
};

}  // namespace

std::vector<std::uint8_t> encode_sequence_stream(std::span<const FastqRecord> records, const EnsembleConfig& dna) {
  if (records.empty()) return {};
  RangeEncoder enc;
  IntModel count;
  count.encode(enc, records.size());
  encode_ensemble_config(enc, dna);

  ModelEnsemble ensemble(dna);
  ModelEnsemble::Session session(ensemble);
  SequenceSideModels side;
  for (const auto& rec : records) {
    const std::string& seq = rec.sequence;
    side.length.encode(enc, seq.size());
    const bool exceptions =
        std::any_of(seq.begin(), seq.end(), [](char c) { return Alphabet::index_of(c) < 0; });
    encode_bit(enc, side.has_exceptions, exceptions);
    session.reset_history();
    int prev_exc = 0;
    for (char c : seq) {
      const int sym = Alphabet::index_of(c);
      if (exceptions) {
        const int exc = sym < 0;
        encode_bit(enc, side.is_exception[prev_exc], exc);
        prev_exc = exc;
        if (exc) {
          side.exception_byte.encode(enc, 0, static_cast<std::uint8_t>(c));
          session.reset_history();
          continue;
        }
      }
      encode_nucleotide(enc, sym, session.predict());
      session.update(static_cast<Symbol>(sym), true);
    }
  }
  return enc.finish();
}

std::vector<std::string> decode_sequence_stream(std::span<const std::uint8_t> bytes) {
  std::vector<std::string> out;
  if (bytes.empty()) return out;
  RangeDecoder dec(bytes);
  IntModel count;
  const std::uint64_t n = count.decode(dec);
  if (n > bytes.size() * 64 + 64) corrupt("sequence stream: implausible record count");
  const EnsembleConfig dna = decode_ensemble_config(dec);

  ModelEnsemble ensemble(dna);
  ModelEnsemble::Session session(ensemble);
  SequenceSideModels side;
  out.reserve(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    const std::uint64_t len = side.length.decode(dec);
    if (len >= kMaxReadLength) corrupt("sequence stream: implausible read length");
    const bool exceptions = decode_bit(dec, side.has_exceptions) != 0;
    session.reset_history();
    std::string seq(len, 'A');
    int prev_exc = 0;
    for (auto& c : seq) {
      if (exceptions) {
        const int exc = decode_bit(dec, side.is_exception[prev_exc]);
        prev_exc = exc;
        if (exc) {
          c = static_cast<char>(side.exception_byte.decode(dec, 0));
          session.reset_history();
          continue;
        }
      }
      const int sym = decode_nucleotide(dec, session.predict());
      session.update(static_cast<Symbol>(sym), true);
      c = Alphabet::letter(static_cast<Symbol>(sym));
    }
    check(dec, "sequence");
    out.push_back(std::move(seq));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Qualities

namespace {

/// Order-2 model over the quality symbols that actually occur. Symbols are
/// ranked within the stream's alphabet (stored up front as a 128-bit mask), so
/// the context table is (K + 1)^2 binary trees of 2^width nodes for K
/// distinct symbols, indexed directly.
class QualityModel {
 public:
  explicit QualityModel(const std::array<std::uint64_t, 2>& mask) {
    for (int b = 0; b < 128; ++b) {
      if ((mask[b >> 6] >> (b & 63)) & 1u) {
        rank_[b] = static_cast<std::uint8_t>(symbols_.size());
        symbols_.push_back(static_cast<std::uint8_t>(b));
      }
    }
    const std::size_t k = symbols_.size();
    width_ = k > 1 ? std::bit_width(k - 1) : 0;
    stride_ = std::size_t{1} << width_;
    none_ = k;
    nodes_.resize((k + 1) * (k + 1) * stride_);
  }

  void start() noexcept { r1_ = r2_ = none_; }

  void encode(RangeEncoder& enc, std::uint8_t q) {
    const unsigned r = rank_[q];
    BitCounter* tree = &nodes_[(r1_ * (none_ + 1) + r2_) * stride_];
    unsigned n = 1;
    for (int i = width_ - 1; i >= 0; --i) {
      const int bit = (r >> i) & 1;
      encode_bit(enc, tree[n], bit);
      n = (n << 1) | static_cast<unsigned>(bit);
    }
    push(r);
  }

  std::uint8_t decode(RangeDecoder& dec) {
    BitCounter* tree = &nodes_[(r1_ * (none_ + 1) + r2_) * stride_];
    unsigned n = 1;
    for (int i = 0; i < width_; ++i) n = (n << 1) | static_cast<unsigned>(decode_bit(dec, tree[n]));
    const unsigned r = n & (static_cast<unsigned>(stride_) - 1);
    if (r >= symbols_.size()) corrupt("quality stream: symbol outside the alphabet");
    push(r);
    return symbols_[r];
  }

 private:
  void push(unsigned r) noexcept {
    r2_ = r1_;
    r1_ = r;
  }

  std::array<std::uint8_t, 128> rank_{};
  std::vector<std::uint8_t> symbols_;
  std::vector<BitCounter> nodes_;
  int width_ = 0;
  std::size_t stride_ = 1;
  std::size_t none_ = 0;
  std::size_t r1_ = 0, r2_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_quality_stream(std::span<const FastqRecord> records) {
  if (records.empty()) return {};
  std::array<std::uint64_t, 2> mask{};
  for (const auto& rec : records)
    for (char c : rec.quality) {
      const auto b = static_cast<std::uint8_t>(c) & 127u;
      mask[b >> 6] |= std::uint64_t{1} << (b & 63);
    }
  RangeEncoder enc;
  IntModel count;
  count.encode(enc, records.size());
  enc.encode_bits(mask[0], 64);
  enc.encode_bits(mask[1], 64);
  LengthModel length;
  QualityModel model(mask);
  for (const auto& rec : records) {
    length.encode(enc, rec.quality.size());
    model.start();
    for (char c : rec.quality) model.encode(enc, static_cast<std::uint8_t>(c));
  }
  return enc.finish();
}

std::vector<std::string> decode_quality_stream(std::span<const std::uint8_t> bytes) {
  std::vector<std::string> out;
  if (bytes.empty()) return out;
  RangeDecoder dec(bytes);
  IntModel count;
  const std::uint64_t n = count.decode(dec);
  if (n > bytes.size() * 64 + 64) corrupt("quality stream: implausible record count");
  std::array<std::uint64_t, 2> mask{};
  mask[0] = dec.decode_bits(64);
  mask[1] = dec.decode_bits(64);
  LengthModel length;
  QualityModel model(mask);
  out.reserve(n);
  for (std::uint64_t r = 0; r < n; ++r) {
    const std::uint64_t len = length.decode(dec);
    if (len >= kMaxReadLength) corrupt("quality stream: implausible read length");
    std::string q(len, '!');
    model.start();
    for (auto& c : q) c = static_cast<char>(model.decode(dec));
    check(dec, "quality");
    out.push_back(std::move(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Container

namespace {
constexpr char kMagic[4] = {'R', 'S', 'Q', 'Z'};

struct Sections {
  std::span<const std::uint8_t> headers, sequences, qualities;
  std::uint64_t checksum = 0;
};

Sections parse_sections(std::span<const std::uint8_t> blob) {
  if (blob.size() < 5) corrupt("truncated container");
  if (std::memcmp(blob.data(), kMagic, 4) != 0) corrupt("bad magic");
  if (blob[4] != kContainerVersion) corrupt("unsupported container version " + std::to_string(blob[4]));
  std::size_t at = 5;
  std::array<std::span<const std::uint8_t>, 3> parts;
  for (auto& part : parts) {
    if (blob.size() - at < 8) corrupt("truncated container");
    const std::uint64_t len = get_u64(blob, at);
    at += 8;
    if (len > blob.size() - at) corrupt("truncated container section");
    part = blob.subspan(at, static_cast<std::size_t>(len));
    at += static_cast<std::size_t>(len);
  }
  if (blob.size() - at != 8) corrupt(blob.size() - at < 8 ? "truncated container" : "trailing bytes after container");
  return Sections{parts[0], parts[1], parts[2], get_u64(blob, at)};
}

}  // namespace

std::uint64_t fastq_checksum(std::span<const FastqRecord> records) {
  std::uint64_t h = kFnvOffset;
  constexpr std::string_view nl = "\n";
  for (const auto& r : records) {
    for (const std::string* line : {&r.header, &r.sequence, &r.separator, &r.quality}) {
      h = fnv1a(*line, h);
      h = fnv1a(nl, h);
    }
  }
  return h;
}

std::vector<std::uint8_t> builtin_compress(std::span<const FastqRecord> records, const CodecConfig& cfg) {
  cfg.dna.validate();
  std::vector<std::uint8_t> headers, sequences, qualities;
  if (cfg.threads > 1) {
    auto h = std::async(std::launch::async, [&] { return encode_header_stream(records); });
    auto q = std::async(std::launch::async, [&] { return encode_quality_stream(records); });
    sequences = encode_sequence_stream(records, cfg.dna);
    headers = h.get();
    qualities = q.get();
  } else {
    headers = encode_header_stream(records);
    sequences = encode_sequence_stream(records, cfg.dna);
    qualities = encode_quality_stream(records);
  }
  std::vector<std::uint8_t> blob(kMagic, kMagic + 4);
  blob.push_back(kContainerVersion);
  for (const auto* part : {&headers, &sequences, &qualities}) {
    put_u64(blob, part->size());
    blob.insert(blob.end(), part->begin(), part->end());
  }
  put_u64(blob, fastq_checksum(records));
  return blob;
}

ContainerSizes inspect_container(std::span<const std::uint8_t> blob) {
  const Sections s = parse_sections(blob);
  return ContainerSizes{s.headers.size(), s.sequences.size(), s.qualities.size(), blob.size()};
}

std::vector<FastqRecord> builtin_decompress(std::span<const std::uint8_t> blob, int threads) {
  const Sections s = parse_sections(blob);
  HeaderChannel headers;
  std::vector<std::string> sequences, qualities;
  if (threads > 1) {
    auto h = std::async(std::launch::async, [&] { return decode_header_stream(s.headers); });
    auto q = std::async(std::launch::async, [&] { return decode_quality_stream(s.qualities); });
    sequences = decode_sequence_stream(s.sequences);
    headers = h.get();
    qualities = q.get();
  } else {
    headers = decode_header_stream(s.headers);
    sequences = decode_sequence_stream(s.sequences);
    qualities = decode_quality_stream(s.qualities);
  }
  const std::size_t n = headers.headers.size();
  if (sequences.size() != n || qualities.size() != n) corrupt("channel record counts disagree");
  std::vector<FastqRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sequences[i].size() != qualities[i].size()) corrupt("sequence and quality lengths disagree");
    out[i] = FastqRecord{std::move(headers.headers[i]), std::move(sequences[i]), std::move(headers.separators[i]),
                         std::move(qualities[i])};
  }
  if (fastq_checksum(out) != s.checksum) corrupt("plaintext checksum mismatch");
  return out;
}

}  // namespace readsort
