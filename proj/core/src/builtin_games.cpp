#include "popdyn/builtin_games.hpp"

namespace popdyn {

GameModel builtin_game(const std::string& name) {
  if (name == "stag_hunt") {
    Eigen::MatrixXd A(2, 2);
    A << 2, 2, 0, 3;
    // F = (2, 3 rho_2) on the simplex, generated by 2 rho_1 + 1.5 rho_2^2
    return GameModel::from_matrix_with_potential(A, [](const Eigen::VectorXd& r) {
      return 2.0 * r[0] + 1.5 * r[1] * r[1];
    });
  }
  if (name == "rsp") {
    Eigen::MatrixXd A(3, 3);
    A << 0, 1, -1, -1, 0, 1, 1, -1, 0;
    return GameModel::from_matrix(A);
  }
  if (name == "rsp_modified") {
    // losses (2) exceed wins (1): the interior equilibrium loses stability
    // at small beta and a limit cycle appears
    Eigen::MatrixXd A(3, 3);
    A << 0, 1, -2, -2, 0, 1, 1, -2, 0;
    return GameModel::from_matrix(A);
  }
  if (name == "example4") {
    Eigen::MatrixXd A(3, 3);
    A << 1, 0, 0, 0, 1, 1, 0, 1, 1;
    return GameModel::from_matrix(A);
  }
  if (name == "example5") {
    Eigen::MatrixXd A(3, 3);
    A << 0.5, 0, 0, 0, 1, 1, 0, 1, 1;
    return GameModel::from_matrix(A);
  }
  throw Error(ErrorCode::config_error, "unknown builtin game: " + name);
}

GameModel congestion_game(int n) {
  return GameModel::from_matrix(-Eigen::MatrixXd::Identity(n, n));
}

std::vector<std::string> builtin_game_names() {
  return {"stag_hunt", "rsp", "rsp_modified", "example4", "example5"};
}

std::vector<std::string> builtin_labels(const std::string& name) {
  if (name == "stag_hunt") return {"H", "S"};
  if (name == "rsp" || name == "rsp_modified") return {"r", "s", "p"};
  if (name == "example4" || name == "example5") return {"1", "2", "3"};
  throw Error(ErrorCode::config_error, "unknown builtin game: " + name);
}

}  // namespace popdyn
