#include "entropybench/bitstream.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace entropybench {

BitSequence::BitSequence(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; }))
    throw std::invalid_argument("BitSequence: elements must be 0 or 1");
}

BitSequence BitSequence::from_string(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1')
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != ' ' && c != '\n' && c != '\t' && c != '\r')
      throw std::invalid_argument("BitSequence: unexpected character in bit string");
  }
  return BitSequence(std::move(bits));
}

std::size_t BitSequence::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BitSequence::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out[i] = '1';
  return out;
}

void IntegerSample::validate() const {
  if (declared_max < 1) throw std::invalid_argument("IntegerSample: declared_max must be at least 1");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > declared_max)
      throw std::invalid_argument("IntegerSample: value " + std::to_string(values[i]) + " at index " +
                                  std::to_string(i) + " exceeds declared_max");
}

BitSequence from_integers(const IntegerSample& sample, int bit_width) {
  if (bit_width < 1 || bit_width > 64) throw std::invalid_argument("from_integers: bit_width must be in [1, 64]");
  std::vector<std::uint8_t> bits;
  bits.reserve(sample.values.size() * static_cast<std::size_t>(bit_width));
  for (const std::uint64_t value : sample.values) {
    if (bit_width < 64 && (value >> bit_width) != 0)
      throw std::invalid_argument("from_integers: value " + std::to_string(value) + " does not fit in " +
                                  std::to_string(bit_width) + " bits");
    for (int shift = bit_width - 1; shift >= 0; --shift)
      bits.push_back(static_cast<std::uint8_t>((value >> shift) & 1U));
  }
  return BitSequence(std::move(bits));
}

std::vector<std::uint64_t> to_integers(const BitSequence& seq, int bit_width) {
  if (bit_width < 1 || bit_width > 64) throw std::invalid_argument("to_integers: bit_width must be in [1, 64]");
  const auto width = static_cast<std::size_t>(bit_width);
  if (seq.size() % width != 0) throw std::invalid_argument("to_integers: length is not a multiple of bit_width");
  std::vector<std::uint64_t> values(seq.size() / width);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < width; ++b) v = (v << 1) | seq[i * width + b];
    values[i] = v;
  }
  return values;
}

BitSequence from_text(std::span<const std::string> passwords, int encoding_width) {
  if (encoding_width != 7 && encoding_width != 8)
    throw std::invalid_argument("from_text: encoding_width must be 7 or 8");
  std::vector<std::uint8_t> bits;
  for (const auto& password : passwords) {
    for (const char c : password) {
      const auto code = static_cast<unsigned char>(c);
      if (encoding_width == 7 && code > 0x7F)
        throw std::invalid_argument("from_text: character code " + std::to_string(code) +
                                    " is not representable in 7 bits");
      for (int shift = encoding_width - 1; shift >= 0; --shift)
        bits.push_back(static_cast<std::uint8_t>((code >> shift) & 1U));
    }
  }
  return BitSequence(std::move(bits));
}

InputFormat sniff_format(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json") return InputFormat::json;
  if (ext == ".csv") return InputFormat::csv;
  if (ext == ".jsonl") return InputFormat::transcript;
  if (ext == ".pw" || ext == ".passwords") return InputFormat::passwords;
  return InputFormat::lines;
}

InputFormat input_format_from_string(std::string_view name) {
  if (name == "lines") return InputFormat::lines;
  if (name == "json") return InputFormat::json;
  if (name == "csv") return InputFormat::csv;
  if (name == "passwords") return InputFormat::passwords;
  if (name == "transcript") return InputFormat::transcript;
  throw std::invalid_argument("unknown input format: " + std::string(name));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_u64(std::string_view token, std::uint64_t& out) {
  if (token.empty()) return false;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    fn(++line_no, line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
}

}  // namespace

std::vector<std::uint64_t> read_integer_lines(std::string_view text) {
  std::vector<std::uint64_t> values;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto token = trim(line);
    if (token.empty()) return;
    std::uint64_t v = 0;
    if (!parse_u64(token, v))
      throw std::runtime_error("line " + std::to_string(line_no) + ": not a non-negative integer: '" +
                               std::string(token) + "'");
    values.push_back(v);
  });
  return values;
}

std::vector<std::uint64_t> read_integer_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  if (!doc.is_array()) throw std::runtime_error("expected a JSON array of integers");
  std::vector<std::uint64_t> values;
  values.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number_unsigned())
      throw std::runtime_error("JSON element " + std::to_string(i) + " is not a non-negative integer");
    values.push_back(doc[i].get<std::uint64_t>());
  }
  return values;
}

std::vector<std::uint64_t> read_integer_csv(std::string_view text) {
  std::vector<std::uint64_t> values;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto token = trim(line.substr(0, line.find(',')));
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"') token = token.substr(1, token.size() - 2);
    if (token.empty()) return;
    std::uint64_t v = 0;
    if (parse_u64(token, v)) {
      values.push_back(v);
    } else if (!(line_no == 1 && values.empty())) {  // a first-row header is allowed
      throw std::runtime_error("CSV row " + std::to_string(line_no) + ": not a non-negative integer: '" +
                               std::string(token) + "'");
    }
  });
  return values;
}

std::vector<std::string> read_password_lines(std::string_view text) {
  std::vector<std::string> out;
  for_each_line(text, [&](std::size_t, std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.emplace_back(line);
  });
  return out;
}

std::vector<std::uint64_t> decimal_runs(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t i = 0;
  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < text.size()) {
    if (!is_digit(text[i])) {
      ++i;
      continue;
    }
    std::uint64_t v = 0;
    bool overflow = false;
    for (; i < text.size() && is_digit(text[i]); ++i) {
      const auto digit = static_cast<std::uint64_t>(text[i] - '0');
      if (v > (UINT64_MAX - digit) / 10) overflow = true;
      else v = v * 10 + digit;
    }
    out.push_back(overflow ? UINT64_MAX : v);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace entropybench
