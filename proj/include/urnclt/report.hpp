#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

namespace urnclt {

// Minimal JSON emitter with deterministic formatting: keys stay in insertion
// order and doubles are printed with 17 significant digits so round-tripping
// reproduces the exact bit pattern. NaN becomes null.
class JsonWriter {
 public:
  std::string str() const { return out_; }

  void begin_object() {
    comma();
    out_ += '{';
    push(true);
  }
  void end_object() {
    out_ += '}';
    pop();
  }
  void begin_array() {
    comma();
    out_ += '[';
    push(false);
  }
  void end_array() {
    out_ += ']';
    pop();
  }

  void key(const std::string& k) {
    comma();
    append_string(k);
    out_ += ':';
    pending_key_ = true;
  }

  void value(double v) {
    comma();
    if (std::isnan(v) || std::isinf(v)) {
      out_ += "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out_ += buf;
  }
  void value(std::int64_t v) {
    comma();
    out_ += std::to_string(v);
  }
  void value(int v) { value(static_cast<std::int64_t>(v)); }
  void value(std::uint64_t v) {
    comma();
    out_ += std::to_string(v);
  }
  void value(bool v) {
    comma();
    out_ += v ? "true" : "false";
  }
  void value(const std::string& v) {
    comma();
    append_string(v);
  }
  void value(const char* v) { value(std::string(v)); }
  void null() {
    comma();
    out_ += "null";
  }
  // Inserts pre-rendered JSON verbatim.
  void raw(const std::string& json) {
    comma();
    out_ += json;
  }

  template <typename T>
  void kv(const std::string& k, const T& v) {
    key(k);
    value(v);
  }

 private:
  void push(bool is_object) {
    depth_ += 1;
    (void)is_object;
    first_ = true;
  }
  void pop() {
    depth_ -= 1;
    first_ = false;
    pending_key_ = false;
  }
  void comma() {
    if (pending_key_) {
      pending_key_ = false;
      return;
    }
    if (!first_ && depth_ > 0) out_ += ',';
    first_ = false;
  }
  void append_string(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  int depth_ = 0;
  bool first_ = true;
  bool pending_key_ = false;
};

}  // namespace urnclt
