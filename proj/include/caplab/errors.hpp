#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace caplab {

// Dense materialization or search exceeded its documented size cap.
class SizeCapError : public std::runtime_error {
public:
    explicit SizeCapError(const std::string& what) : std::runtime_error(what) {}
};

// restrict_normalize with v(X\O) = 0; callers must branch on this case.
class DegenerateRestrictionError : public std::runtime_error {
public:
    explicit DegenerateRestrictionError(const std::string& what) : std::runtime_error(what) {}
};

// A constructive Lusin run could not meet a cell's regularity budget.
// cell_index is 1-based; index N+1 denotes the tail bound over all cells.
class ConstructionInfeasibleError : public std::runtime_error {
public:
    ConstructionInfeasibleError(const std::string& what, std::size_t cell_index,
                                std::string cell_hex, double budget, double best_value)
        : std::runtime_error(what),
          cell_index(cell_index),
          cell_hex(std::move(cell_hex)),
          budget(budget),
          best_value(best_value) {}

    std::size_t cell_index;
    std::string cell_hex;
    double budget;
    double best_value;
};

// Scenario config failed validation (unknown field, bad rational, broken nesting, ...).
class ScenarioInvalidError : public std::runtime_error {
public:
    explicit ScenarioInvalidError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace caplab
