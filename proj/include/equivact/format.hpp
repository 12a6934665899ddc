#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace equivact {

/// Fixed 17-significant-digit decimal formatting. Round-trips doubles exactly
/// and keeps report files byte-identical across reruns.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

/// Minimal deterministic JSON emitter: insertion-ordered keys, compact
/// separators, format_double for all numbers.
class JsonWriter {
 public:
  std::string take() { return std::move(out_); }
  const std::string& str() const { return out_; }

  JsonWriter& begin_object() {
    comma();
    out_ += '{';
    stack_.push_back(false);
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    stack_.pop_back();
    mark();
    return *this;
  }
  JsonWriter& begin_array() {
    comma();
    out_ += '[';
    stack_.push_back(false);
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    stack_.pop_back();
    mark();
    return *this;
  }
  JsonWriter& key(std::string_view k) {
    comma();
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
    pending_value_ = true;
    return *this;
  }
  JsonWriter& value(double v) {
    comma();
    out_ += format_double(v);
    mark();
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(long long v) {
    comma();
    out_ += std::to_string(v);
    mark();
    return *this;
  }
  JsonWriter& value(unsigned long long v) {
    comma();
    out_ += std::to_string(v);
    mark();
    return *this;
  }
  JsonWriter& value(std::string_view s) {
    comma();
    out_ += '"';
    out_ += json_escape(s);
    out_ += '"';
    mark();
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string_view(s)); }
  JsonWriter& value(bool b) {
    comma();
    out_ += b ? "true" : "false";
    mark();
    return *this;
  }

 private:
  void comma() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!stack_.empty() && stack_.back()) out_ += ',';
  }
  void mark() {
    if (!stack_.empty()) stack_.back() = true;
  }

  std::string out_;
  std::vector<bool> stack_;  // per level: has emitted an element
  bool pending_value_ = false;
};

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ += ',';
      out_ += header[i];
    }
    out_ += '\n';
  }

  CsvWriter& cell(double v) { return raw(format_double(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& cell(long long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(unsigned long long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(std::string_view s) { return raw(std::string(s)); }
  CsvWriter& endrow() {
    out_ += '\n';
    first_ = true;
    return *this;
  }
  const std::string& str() const { return out_; }

 private:
  CsvWriter& raw(const std::string& s) {
    if (!first_) out_ += ',';
    first_ = false;
    out_ += s;
    return *this;
  }
  std::string out_;
  bool first_ = true;
};

/// Write-to-temp then rename: a failed run never leaves a partial file at the
/// final path.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace equivact
