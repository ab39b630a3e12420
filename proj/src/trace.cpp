#include "starsim/trace.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace starsim {

TraceParseError::TraceParseError(std::size_t line, const std::string& message)
    : std::runtime_error("trace line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::optional<std::uint64_t> parse_uint(std::string_view s, int base) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

bool has_hex_prefix(std::string_view s) { return s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'); }

class LineParser {
 public:
  LineParser(std::size_t line, unsigned domain_bits) : line_(line), domains_(domain_bits) {}

  Address address(std::string_view tok) const {
    const auto v = parse_uint(has_hex_prefix(tok) ? tok.substr(2) : tok, 16);
    if (!v) fail("malformed address '" + std::string(tok) + "'");
    if (*v >= kAddressLimit) fail("address " + std::string(tok) + " does not fit in 48 bits");
    return Address::make(*v);
  }

  DomainId domain(std::string_view tok) const {
    const auto v = parse_uint(tok, 10);
    if (!v || *v > 0xFFFE || !domains_.fits(DomainId(static_cast<std::uint16_t>(*v)))) {
      fail("domain '" + std::string(tok) + "' does not fit in " + std::to_string(domains_.width_bits()) + " bits");
    }
    return DomainId(static_cast<std::uint16_t>(*v));
  }

  std::uint8_t byte(std::string_view tok) const {
    const auto v = has_hex_prefix(tok) ? parse_uint(tok.substr(2), 16) : parse_uint(tok, 10);
    if (!v || *v > 0xFF) fail("store value '" + std::string(tok) + "' is not a byte");
    return static_cast<std::uint8_t>(*v);
  }

  [[noreturn]] void fail(const std::string& msg) const { throw TraceParseError(line_, msg); }

 private:
  std::size_t line_;
  DomainAllocator domains_;
};

}  // namespace

std::vector<TraceEvent> parse_trace(std::string_view text, unsigned domain_bits) {
  std::vector<TraceEvent> events;
  std::size_t line_no = 0;
  std::size_t open_window = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const LineParser p(line_no, domain_bits);
    const auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    TraceEvent ev;
    ev.line = line_no;
    if (raw[first] == '#') {
      ev.op = TraceOp::Comment;
      ev.comment = std::string(raw.substr(first + 1));
      while (!ev.comment.empty() && (ev.comment.back() == '\r' || ev.comment.back() == ' ')) ev.comment.pop_back();
      if (!ev.comment.empty() && ev.comment.front() == ' ') ev.comment.erase(0, 1);
      events.push_back(std::move(ev));
      continue;
    }

    const auto tok = split_ws(raw);
    const std::string_view kw = tok[0];
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (tok.size() < lo || tok.size() > hi) p.fail("wrong number of fields for " + std::string(kw));
    };
    if (kw == "L") {
      arity(2, 3);
      ev.op = TraceOp::Load;
      ev.addr = p.address(tok[1]);
      if (tok.size() == 3) ev.domain = p.domain(tok[2]);
    } else if (kw == "S") {
      arity(2, 4);
      ev.op = TraceOp::Store;
      ev.addr = p.address(tok[1]);
      if (tok.size() >= 3) ev.domain = p.domain(tok[2]);
      if (tok.size() == 4) ev.value = p.byte(tok[3]);
    } else if (kw == "SPEC_BEGIN") {
      arity(1, 1);
      if (open_window != 0) p.fail("nested SPEC_BEGIN (window opened on line " + std::to_string(open_window) + ")");
      ev.op = TraceOp::SpecBegin;
      open_window = line_no;
    } else if (kw == "SPEC_END") {
      arity(2, 2);
      if (open_window == 0) p.fail("SPEC_END without SPEC_BEGIN");
      if (tok[1] == "commit") {
        ev.squash = false;
      } else if (tok[1] == "squash") {
        ev.squash = true;
      } else {
        p.fail("SPEC_END expects commit or squash");
      }
      ev.op = TraceOp::SpecEnd;
      open_window = 0;
    } else if (kw == "DOMAIN_SWITCH") {
      arity(2, 2);
      ev.op = TraceOp::DomainSwitch;
      ev.domain = p.domain(tok[1]);
    } else {
      p.fail("unknown event '" + std::string(kw) + "'");
    }
    events.push_back(std::move(ev));
  }
  if (open_window != 0) throw TraceParseError(open_window, "SPEC_BEGIN is never closed");
  return events;
}

std::string format_trace(const std::vector<TraceEvent>& events) {
  std::string out;
  char buf[64];
  for (const TraceEvent& ev : events) {
    switch (ev.op) {
      case TraceOp::Load:
      case TraceOp::Store:
        std::snprintf(buf, sizeof buf, "%s 0x%llx", ev.op == TraceOp::Load ? "L" : "S",
                      static_cast<unsigned long long>(ev.addr.value()));
        out += buf;
        if (ev.domain) out += " " + std::to_string(ev.domain->value());
        if (ev.op == TraceOp::Store && ev.value != 0) {
          if (!ev.domain) throw std::invalid_argument("a store value needs an explicit domain");
          out += " " + std::to_string(ev.value);
        }
        break;
      case TraceOp::SpecBegin: out += "SPEC_BEGIN"; break;
      case TraceOp::SpecEnd: out += ev.squash ? "SPEC_END squash" : "SPEC_END commit"; break;
      case TraceOp::DomainSwitch: out += "DOMAIN_SWITCH " + std::to_string(ev.domain.value_or(DomainId(0)).value()); break;
      case TraceOp::Comment: out += "# " + ev.comment; break;
    }
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> read_trace_file(const std::string& path, unsigned domain_bits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), domain_bits);
}

}  // namespace starsim
