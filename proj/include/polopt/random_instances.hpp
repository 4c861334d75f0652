#pragma once

#include <cstdint>

#include "polopt/lqr.hpp"
#include "polopt/mdp.hpp"

namespace polopt {

/// Dense random MDP. Every transition row gets a strictly positive floor, so
/// every policy induces an ergodic chain. Rewards are uniform in [-1, 1].
TabularMdp random_mdp(std::uint64_t seed, int n_states, int n_actions);

/// Random episodic MDP: state n-1 is an absorbing zero-reward terminal and
/// every (s, a) reaches it with probability at least `exit_prob`.
TabularMdp random_episodic_mdp(std::uint64_t seed, int n_states, int n_actions,
                               double exit_prob = 0.2);

/// Softmax policy with standard-normal logits.
SoftmaxPolicy random_softmax_policy(std::uint64_t seed, int n_states, int n_actions);

/// The two-state benchmark system: A = alpha [0.9 0.1; 0 1.1], B = [0; 1],
/// W = Q = I, R = 1.
lqr::LqrProblem benchmark_lqr_problem(double alpha = 1.0);

/// Random LQR problem with spectral radius of A below 0.95 (so K = 0 is
/// stable in every setup), PD noise/cost matrices.
lqr::LqrProblem random_lqr_problem(std::uint64_t seed, int n, int m);

/// Random gains kept inside the stability region of (problem, setup).
lqr::LqrGains random_stable_gains(const lqr::LqrProblem& problem, const Setup& setup,
                                  std::uint64_t seed);

}  // namespace polopt
