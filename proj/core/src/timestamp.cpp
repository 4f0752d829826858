#include "spatialpu/timestamp.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>

#include "spatialpu/error.hpp"

namespace spu {
namespace {

class Cursor {
 public:
  Cursor(std::string_view text, std::string_view whole) : text_(text), whole_(whole) {}

  int digits(std::size_t count) {
    if (text_.size() < count) fail();
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const char c = text_[i];
      if (!std::isdigit(static_cast<unsigned char>(c))) fail();
      value = value * 10 + (c - '0');
    }
    text_.remove_prefix(count);
    return value;
  }

  void expect(char c) {
    if (text_.empty() || text_.front() != c) fail();
    text_.remove_prefix(1);
  }

  bool accept(char c) {
    if (!text_.empty() && text_.front() == c) {
      text_.remove_prefix(1);
      return true;
    }
    return false;
  }

  void skip_spaces() {
    while (!text_.empty() && std::isspace(static_cast<unsigned char>(text_.front()))) text_.remove_prefix(1);
  }

  std::string_view rest() const { return text_; }
  bool done() const { return text_.empty(); }

  [[noreturn]] void fail() const {
    throw InputError("unparseable timestamp '" + std::string(whole_) + "'", std::string(whole_));
  }

 private:
  std::string_view text_;
  std::string_view whole_;
};

std::int64_t civil_to_epoch_ms(int y, int mo, int d, int h, int mi, int s, int ms) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw InputError("invalid calendar timestamp");
  }
  const sys_days days{ymd};
  const auto total = days.time_since_epoch() + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
  return duration_cast<milliseconds>(total).count();
}

}  // namespace

int parse_utc_offset(std::string_view text) {
  if (text == "Z" || text == "z" || text == "UTC") return 0;
  Cursor cur(text, text);
  int sign = 1;
  if (cur.accept('-')) {
    sign = -1;
  } else {
    cur.expect('+');
  }
  const int hh = cur.digits(2);
  cur.accept(':');
  const int mm = cur.digits(2);
  if (!cur.done()) cur.fail();
  return sign * (hh * 60 + mm);
}

Timestamp parse_timestamp(std::string_view text, int default_offset_minutes) {
  Cursor cur(text, text);
  cur.skip_spaces();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  const std::string_view head = cur.rest();
  if (head.size() >= 3 && head[2] == '/') {
    mo = cur.digits(2);
    cur.expect('/');
    d = cur.digits(2);
    cur.expect('/');
    y = cur.digits(4);
    cur.skip_spaces();
    if (!cur.done()) {
      h = cur.digits(2);
      cur.expect(':');
      mi = cur.digits(2);
      if (cur.accept(':')) s = cur.digits(2);
      cur.skip_spaces();
      if (cur.accept('A')) {
        cur.expect('M');
        if (h == 12) h = 0;
      } else if (cur.accept('P')) {
        cur.expect('M');
        if (h != 12) h += 12;
      }
    }
    cur.skip_spaces();
    if (!cur.done()) cur.fail();
    const std::int64_t local = civil_to_epoch_ms(y, mo, d, h, mi, s, 0);
    return Timestamp{local - static_cast<std::int64_t>(default_offset_minutes) * 60'000};
  }

  y = cur.digits(4);
  cur.expect('-');
  mo = cur.digits(2);
  cur.expect('-');
  d = cur.digits(2);
  int offset = default_offset_minutes;
  if (cur.accept('T') || cur.accept(' ')) {
    h = cur.digits(2);
    cur.expect(':');
    mi = cur.digits(2);
    if (cur.accept(':')) {
      s = cur.digits(2);
      if (cur.accept('.')) {
        int scale = 100;
        while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.rest().front()))) {
          ms += cur.digits(1) * scale;
          scale /= 10;
        }
      }
    }
  }
  cur.skip_spaces();
  if (!cur.done()) offset = parse_utc_offset(cur.rest());
  const std::int64_t local = civil_to_epoch_ms(y, mo, d, h, mi, s, ms);
  return Timestamp{local - static_cast<std::int64_t>(offset) * 60'000};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const milliseconds total{t.epoch_ms};
  const sys_days days = floor<std::chrono::days>(sys_time<milliseconds>(total));
  const year_month_day ymd{days};
  const auto rem = total - days.time_since_epoch();
  const auto hh = duration_cast<hours>(rem);
  const auto mm = duration_cast<minutes>(rem - hh);
  const auto ss = duration_cast<seconds>(rem - hh - mm);
  const auto mss = duration_cast<milliseconds>(rem - hh - mm - ss);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hh.count()), static_cast<int>(mm.count()),
                static_cast<int>(ss.count()), static_cast<int>(mss.count()));
  return buf;
}

}  // namespace spu
