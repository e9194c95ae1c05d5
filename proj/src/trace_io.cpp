#include <istream>
#include <ostream>
#include <string>

#include <boost/algorithm/string.hpp>

#include "lcv/core.hpp"

namespace lcv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  boost::split(out, line, boost::is_any_of(","));
  for (auto& f : out) boost::trim(f);
  return out;
}

void check_token(const std::string& name) {
  if (name.empty() || name.find_first_of(", \t\r\n") != std::string::npos)
    throw Error("symbol name '" + name + "' cannot be serialized");
}

}  // namespace

std::string external_name(const Alphabet& alphabet, SymbolId id) {
  if (alphabet.is_dagger(id)) return std::string(kDaggerToken);
  return alphabet.name(id);
}

std::string internal_name(std::string_view token) {
  if (token == kDaggerToken) return std::string(Alphabet::kDaggerName);
  return std::string(token);
}

void write_traces_csv(std::ostream& out, const TraceSet& traces) {
  const auto& alphabet = traces.alphabet();
  out << "# alphabet: ";
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    auto name = external_name(alphabet, SymbolId(static_cast<std::uint32_t>(i)));
    check_token(name);
    out << (i ? "," : "") << name;
  }
  out << "\n# H: " << traces.horizon() << "\n";
  out << "# seed: " << traces.provenance().seed << "\n";
  if (!traces.provenance().system.empty()) out << "# system: " << traces.provenance().system << "\n";
  for (const auto& t : traces.traces()) {
    for (std::size_t k = 0; k < t.horizon(); ++k)
      out << (k ? "," : "") << external_name(alphabet, t[k]);
    out << "\n";
  }
}

TraceSet read_traces_csv(std::istream& in) {
  std::optional<Alphabet> alphabet;
  std::optional<std::size_t> horizon;
  Provenance provenance;
  std::vector<Trace> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    boost::trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = line.substr(1);
      auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      auto key = boost::trim_copy(body.substr(0, colon));
      auto value = boost::trim_copy(body.substr(colon + 1));
      if (key == "alphabet") {
        Alphabet a;
        for (const auto& f : split_fields(value)) a.intern(internal_name(f));
        alphabet = std::move(a);
      } else if (key == "H") {
        horizon = std::stoul(value);
      } else if (key == "seed") {
        provenance.seed = std::stoull(value);
      } else if (key == "system") {
        provenance.system = value;
      }
      continue;
    }
    if (!alphabet || !horizon)
      throw Error("trace CSV: '# alphabet:' and '# H:' headers must precede the data");
    std::vector<SymbolId> symbols;
    for (const auto& f : split_fields(line)) {
      auto id = alphabet->find(internal_name(f));
      if (!id)
        throw Error("trace CSV line " + std::to_string(line_no) + ": unknown symbol '" + f + "'");
      symbols.push_back(*id);
    }
    if (symbols.size() != *horizon)
      throw Error("trace CSV line " + std::to_string(line_no) + ": expected " +
                  std::to_string(*horizon) + " symbols, got " + std::to_string(symbols.size()));
    traces.emplace_back(std::move(symbols), *alphabet);
  }
  if (!alphabet || !horizon) throw Error("trace CSV: missing '# alphabet:' or '# H:' header");
  return TraceSet(std::move(*alphabet), *horizon, std::move(traces), std::move(provenance));
}

}  // namespace lcv
