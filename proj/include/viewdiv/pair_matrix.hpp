#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "viewdiv/detail/util.hpp"
#include "viewdiv/errors.hpp"

namespace viewdiv {

// Dense pairwise score matrix over an ordered id list. Distance kinds
// keep a zero diagonal; the relevance kind keeps 1 there. Values are
// addressable by position or by id pair.
class PairMatrix {
public:
    PairMatrix() = default;

    PairMatrix(std::vector<std::string> ids, std::string kind, double fill = 0.0)
        : ids_(std::move(ids)), kind_(std::move(kind)),
          values_(ids_.size() * ids_.size(), fill) {
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            if (index_.count(ids_[i]))
                throw ValidationError("matrix '" + kind_ + "': duplicate id '" + ids_[i] + "'");
            index_.emplace(ids_[i], i);
        }
    }

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& kind() const { return kind_; }

    double& at(std::size_t i, std::size_t j) { return values_[i * ids_.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values_[i * ids_.size() + j]; }

    std::size_t index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw LookupError("matrix '" + kind_ + "' has no entry for id '" + id + "'");
        return it->second;
    }

    bool contains(const std::string& id) const { return index_.count(id) != 0; }

    double between(const std::string& a, const std::string& b) const {
        auto ia = index_.find(a);
        auto ib = index_.find(b);
        if (ia == index_.end() || ib == index_.end())
            throw LookupError("matrix '" + kind_ + "' has no entry for id pair ('" + a +
                              "', '" + b + "')");
        return at(ia->second, ib->second);
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool same_ids(const PairMatrix& other) const { return ids_ == other.ids_; }

    // Header row/column of ids, %.12g values.
    void to_csv(std::ostream& out) const {
        out << "id";
        for (const auto& id : ids_) out << ',' << id;
        out << '\n';
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            out << ids_[i];
            for (std::size_t j = 0; j < ids_.size(); ++j)
                out << ',' << detail::format_g12(at(i, j));
            out << '\n';
        }
    }

private:
    std::vector<std::string> ids_;
    std::string kind_;
    std::vector<double> values_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace viewdiv
