#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "innerlab/map_chain.hpp"

namespace innerlab {

/// A deterministic generator of inner maps: index n >= 1 -> map f_n, with
/// the purity contract that repeated queries at the same index return
/// identical maps. Sequences may be autonomous, formula-driven or
/// table-driven.
class InnerMapSequence {
  public:
    using Generator = std::function<MapChain(std::int64_t)>;

    InnerMapSequence() = default;
    explicit InnerMapSequence(Generator gen, std::string name = "")
        : gen_(std::move(gen)), name_(std::move(name)) {}

    static InnerMapSequence autonomous(FiniteBlaschke f, std::string name = "") {
        MapChain chain(std::move(f));
        return InnerMapSequence([chain](std::int64_t) { return chain; }, std::move(name));
    }
    static InnerMapSequence autonomous(MapChain chain, std::string name = "") {
        return InnerMapSequence([chain](std::int64_t) { return chain; }, std::move(name));
    }
    static InnerMapSequence from_table(std::vector<MapChain> maps, std::string name = "") {
        auto table = std::make_shared<std::vector<MapChain>>(std::move(maps));
        return InnerMapSequence(
            [table](std::int64_t n) -> MapChain {
                if (n < 1 || n > static_cast<std::int64_t>(table->size()))
                    throw DomainError("InnerMapSequence: index outside table");
                return (*table)[static_cast<std::size_t>(n - 1)];
            },
            std::move(name));
    }
    static InnerMapSequence from_factors(std::function<FiniteBlaschke(std::int64_t)> f,
                                         std::string name = "") {
        return InnerMapSequence(
            [f = std::move(f)](std::int64_t n) { return MapChain(f(n)); }, std::move(name));
    }

    bool valid() const { return static_cast<bool>(gen_); }

    MapChain at(std::int64_t n) const {
        if (n < 1) throw DomainError("InnerMapSequence: indices start at 1");
        return gen_(n);
    }

    /// Maps n0..n1 inclusive, generated once; orbit loops iterate over this
    /// table instead of re-querying the generator per sample.
    std::vector<MapChain> materialize(std::int64_t n0, std::int64_t n1) const {
        std::vector<MapChain> out;
        out.reserve(static_cast<std::size_t>(n1 - n0 + 1));
        for (std::int64_t n = n0; n <= n1; ++n) out.push_back(at(n));
        return out;
    }

    const std::string& name() const { return name_; }

  private:
    Generator gen_;
    std::string name_;
};

}  // namespace innerlab
