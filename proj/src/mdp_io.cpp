#include "famrl/mdp_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

#include "famrl/errors.hpp"

namespace famrl {

namespace {
void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) throw InvalidArgument("read_mdp: expected '" + token + "', got '" + got + "'");
}

template <class T>
T read_value(std::istream& in, const char* what) {
  T v{};
  if (!(in >> v)) throw InvalidArgument(std::string("read_mdp: malformed ") + what);
  return v;
}

void write_table(std::ostream& out, std::span<const double> values, std::size_t actions) {
  for (std::size_t i = 0; i < values.size(); ++i) out << values[i] << ((i + 1) % actions == 0 ? '\n' : ' ');
}
}  // namespace

void write_mdp(std::ostream& out, const TabularMdp& mdp) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  const std::size_t S = mdp.num_states();
  const std::size_t A = mdp.num_actions();
  out << "famrl-mdp 1\n";
  out << "states " << S << " actions " << A << '\n';
  out << "transitions\n";
  for (std::size_t x = 0; x < S; ++x) {
    for (std::size_t a = 0; a < A; ++a) {
      auto succ = mdp.successors(x, a);
      out << succ.size();
      for (const auto& s : succ) out << ' ' << s.state << ' ' << s.prob;
      out << '\n';
    }
  }
  out << "reward_extrinsic\n";
  write_table(out, mdp.rewards_extrinsic(), A);
  out << "reward_intrinsic\n";
  write_table(out, mdp.rewards_intrinsic(), A);
  out << "terminal\n";
  for (std::size_t x = 0; x < S; ++x) out << (mdp.is_terminal(x) ? 1 : 0) << (x + 1 == S ? '\n' : ' ');
  out.precision(old_precision);
}

TabularMdp read_mdp(std::istream& in) {
  expect_token(in, "famrl-mdp");
  if (read_value<int>(in, "version") != 1) throw InvalidArgument("read_mdp: unsupported version");
  expect_token(in, "states");
  const auto S = read_value<std::size_t>(in, "state count");
  expect_token(in, "actions");
  const auto A = read_value<std::size_t>(in, "action count");

  expect_token(in, "transitions");
  std::vector<std::vector<Successor>> rows(S * A);
  for (auto& row : rows) {
    const auto count = read_value<std::size_t>(in, "successor count");
    if (count > S) throw InvalidArgument("read_mdp: successor count exceeds state count");
    row.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const auto y = read_value<std::size_t>(in, "successor state");
      const auto p = read_value<double>(in, "transition probability");
      row.push_back({y, p});
    }
  }
  auto read_table = [&](const char* name) {
    expect_token(in, name);
    std::vector<double> t(S * A);
    for (double& v : t) v = read_value<double>(in, name);
    return t;
  };
  auto re = read_table("reward_extrinsic");
  auto ri = read_table("reward_intrinsic");
  expect_token(in, "terminal");
  std::vector<bool> terminal(S);
  for (std::size_t x = 0; x < S; ++x) terminal[x] = read_value<int>(in, "terminal flag") != 0;
  return TabularMdp(S, A, std::move(rows), std::move(re), std::move(ri), std::move(terminal));
}

void save_mdp(const std::string& path, const TabularMdp& mdp) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("save_mdp: cannot open " + path);
  write_mdp(out, mdp);
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("load_mdp: cannot open " + path);
  return read_mdp(in);
}

}  // namespace famrl
