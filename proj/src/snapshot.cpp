#include "ikpca/snapshot.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ikpca/errors.hpp"
#include "ikpca/table.hpp"

namespace ikpca {
namespace {

void expect_word(std::istream& in, const std::string& want) {
  std::string got;
  if (!(in >> got) || got != want) {
    throw ParseError("snapshot: expected \"" + want + "\", got \"" + got + "\"");
  }
}

double read_double(std::istream& in, const char* field) {
  std::string token;
  if (!(in >> token)) {
    throw ParseError(std::string("snapshot: missing value for ") + field);
  }
  const char* begin = token.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end != begin + token.size()) {
    throw ParseError(std::string("snapshot: bad number for ") + field + ": \"" +
                     token + "\"");
  }
  return value;
}

long long read_count(std::istream& in, const char* field) {
  long long value = 0;
  if (!(in >> value) || value < 0) {
    throw ParseError(std::string("snapshot: bad count for ") + field);
  }
  return value;
}

void write_row(std::ostream& out, const Vector<double>& row) {
  for (Index i = 0; i < row.size(); ++i) {
    if (i > 0) out << ' ';
    out << format_double(row[i]);
  }
  out << '\n';
}

}  // namespace

void save_state(const IkpcaState<double>& state, std::ostream& out) {
  const Index m = state.size();
  const Index dim = m > 0 ? state.points.front().size() : 0;
  out << "ikpca-state 1\n";
  out << "mode "
      << (state.mode == CenteringMode::ZeroMean ? "zero-mean" : "centered")
      << '\n';
  out << "kernel rbf " << format_double(state.kernel.sigma) << '\n';
  out << "m " << m << " dim " << dim << '\n';
  out << "kernel_sum " << format_double(state.kernel_sum) << '\n';
  out << "update_count " << state.update_count << " bootstrap "
      << state.bootstrap_size << " next_stream " << state.next_stream_index
      << '\n';
  out << "exclusion_threshold " << format_double(state.exclusion_threshold_rel)
      << '\n';
  out << "values\n";
  write_row(out, state.decomp.values);
  out << "vectors\n";
  for (Index r = 0; r < m; ++r) {
    write_row(out, state.decomp.vectors.row(r).transpose());
  }
  out << "row_sums\n";
  write_row(out, state.row_sums);
  out << "points\n";
  for (Index r = 0; r < m; ++r) {
    write_row(out, state.points[static_cast<std::size_t>(r)]);
  }
  out << "excluded " << state.excluded.size() << '\n';
  for (const ExclusionRecord& rec : state.excluded) {
    out << rec.stream_index << ' ' << rec.reason << '\n';
  }
  if (!out) throw std::runtime_error("snapshot: write failed");
}

void save_state(const IkpcaState<double>& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("snapshot: cannot open " + path);
  save_state(state, out);
  out.flush();
  if (!out) throw std::runtime_error("snapshot: write failed: " + path);
}

IkpcaState<double> load_state(std::istream& in) {
  expect_word(in, "ikpca-state");
  long long version = read_count(in, "version");
  if (version != 1) {
    throw ParseError("snapshot: unsupported version " +
                     std::to_string(version));
  }

  IkpcaState<double> state;
  expect_word(in, "mode");
  std::string mode;
  if (!(in >> mode)) throw ParseError("snapshot: missing mode");
  if (mode == "zero-mean") {
    state.mode = CenteringMode::ZeroMean;
  } else if (mode == "centered") {
    state.mode = CenteringMode::Centered;
  } else {
    throw ParseError("snapshot: unknown mode \"" + mode + "\"");
  }

  expect_word(in, "kernel");
  expect_word(in, "rbf");
  state.kernel.family = KernelFamily::Rbf;
  state.kernel.sigma = read_double(in, "sigma");

  expect_word(in, "m");
  const Index m = static_cast<Index>(read_count(in, "m"));
  expect_word(in, "dim");
  const Index dim = static_cast<Index>(read_count(in, "dim"));

  expect_word(in, "kernel_sum");
  state.kernel_sum = read_double(in, "kernel_sum");
  expect_word(in, "update_count");
  state.update_count = read_count(in, "update_count");
  expect_word(in, "bootstrap");
  state.bootstrap_size = static_cast<Index>(read_count(in, "bootstrap"));
  expect_word(in, "next_stream");
  state.next_stream_index = read_count(in, "next_stream");
  expect_word(in, "exclusion_threshold");
  state.exclusion_threshold_rel = read_double(in, "exclusion_threshold");

  expect_word(in, "values");
  state.decomp.values.resize(m);
  for (Index i = 0; i < m; ++i) {
    state.decomp.values[i] = read_double(in, "values");
  }
  expect_word(in, "vectors");
  state.decomp.vectors.resize(m, m);
  for (Index r = 0; r < m; ++r) {
    for (Index c = 0; c < m; ++c) {
      state.decomp.vectors(r, c) = read_double(in, "vectors");
    }
  }
  expect_word(in, "row_sums");
  state.row_sums.resize(m);
  for (Index i = 0; i < m; ++i) {
    state.row_sums[i] = read_double(in, "row_sums");
  }
  expect_word(in, "points");
  state.points.clear();
  state.points.reserve(static_cast<std::size_t>(m));
  for (Index r = 0; r < m; ++r) {
    Vector<double> point(dim);
    for (Index c = 0; c < dim; ++c) {
      point[c] = read_double(in, "points");
    }
    state.points.push_back(std::move(point));
  }

  expect_word(in, "excluded");
  const long long excluded = read_count(in, "excluded");
  state.excluded.clear();
  for (long long i = 0; i < excluded; ++i) {
    ExclusionRecord rec;
    if (!(in >> rec.stream_index)) {
      throw ParseError("snapshot: bad exclusion record");
    }
    if (in.peek() == ' ') in.get();
    std::getline(in, rec.reason);
    if (!rec.reason.empty() && rec.reason.back() == '\r') rec.reason.pop_back();
    state.excluded.push_back(std::move(rec));
  }
  return state;
}

IkpcaState<double> load_state(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path);
  return load_state(in);
}

}  // namespace ikpca
