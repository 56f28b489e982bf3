// SPDX-License-Identifier: Apache-2.0
//
// Game file format (s-expression document):
//
//   (game
//     (inputs (i Int) (b Bool))
//     (vars (x Int) (y Int))
//     (locations (loop (dom true)) (done))
//     (init loop)
//     (trans loop done (<= y 0))
//     (winning (reach done)))
//
// Formulas use SMT term syntax; primed occurrences carry the suffix ' and
// are only legal inside trans formulas. Missing dom defaults to true,
// missing trans entries to false.

#ifndef GALATT_GAME_PARSER_HPP
#define GALATT_GAME_PARSER_HPP

#include <string>
#include <utility>

#include "game.hpp"

namespace galatt {

struct ParsedGame {
  SymbolicGame game;
  WinningCondition winning;
};

ParsedGame parse_game(const std::string& text);
ParsedGame parse_game_file(const std::string& path);

std::string print_game(const SymbolicGame& g, const WinningCondition& w);

}  // namespace galatt

#endif
