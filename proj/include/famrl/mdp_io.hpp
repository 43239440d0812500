#pragma once

#include <iosfwd>
#include <string>

#include "famrl/mdp.hpp"

namespace famrl {

// Text layout (whitespace separated, values printed with 17 significant digits):
//
//   famrl-mdp 1
//   states <S> actions <A>
//   transitions
//   <S*A rows in (x, a) row-major order: count y_1 p_1 ... y_count p_count>
//   reward_extrinsic
//   <S rows of A values>
//   reward_intrinsic
//   <S rows of A values>
//   terminal
//   <S values, 0 or 1>

void write_mdp(std::ostream& out, const TabularMdp& mdp);
TabularMdp read_mdp(std::istream& in);

void save_mdp(const std::string& path, const TabularMdp& mdp);
TabularMdp load_mdp(const std::string& path);

}  // namespace famrl
