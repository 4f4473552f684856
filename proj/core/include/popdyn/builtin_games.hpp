#pragma once

#include <string>
#include <vector>

#include "popdyn/game_model.hpp"

namespace popdyn {

/// Named game from the built-in catalog:
///   stag_hunt      2x2 hare/stag coordination game (h=2, s=3), declared
///                  potential 2 rho_1 + 1.5 rho_2^2
///   rsp            standard zero-sum Rock-Scissors-Paper
///   rsp_modified   Rock-Scissors-Paper variant with losses larger than
///                  wins; exhibits a Hopf bifurcation in beta
///   example4       3-strategy coordination game with two Gibbs measures
///                  at small beta
///   example5       as example4 with halved payoff for strategy 1
GameModel builtin_game(const std::string& name);

/// Congestion-style game with payoff matrix -Identity (concave potential).
GameModel congestion_game(int n);

std::vector<std::string> builtin_game_names();

/// Display labels for a builtin (e.g. {"H","S"} for stag_hunt).
std::vector<std::string> builtin_labels(const std::string& name);

}  // namespace popdyn
