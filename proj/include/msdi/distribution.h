#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msdi/errors.h"
#include "msdi/rational.h"

namespace msdi {

/// Finite joint distribution over named integer-valued variables.
/// Works with P = double or P = Rational; entries with probability 0 are not stored.
template <class P>
class BasicDistribution {
   public:
    using Outcome = std::vector<std::int64_t>;
    using Given = std::vector<std::pair<std::string, std::int64_t>>;

    BasicDistribution() = default;
    explicit BasicDistribution(std::vector<std::string> vars) : vars_(std::move(vars)) {
    }

    const std::vector<std::string> &vars() const { return vars_; }
    const std::map<Outcome, P> &entries() const { return probs_; }
    std::size_t size() const { return probs_.size(); }

    void add(const Outcome &o, const P &p) {
        if (o.size() != vars_.size()) {
            throw SupportMismatch("outcome arity does not match variable list");
        }
        if (p == 0) {
            return;
        }
        auto [it, inserted] = probs_.try_emplace(o, p);
        if (!inserted) {
            it->second += p;
        }
    }

    P prob(const Outcome &o) const {
        auto it = probs_.find(o);
        return it == probs_.end() ? P(0) : it->second;
    }

    P total() const {
        P t = 0;
        for (const auto &[o, p] : probs_) {
            t += p;
        }
        return t;
    }

    std::size_t index_of(const std::string &name) const {
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it == vars_.end()) {
            throw SupportMismatch("unknown variable " + name);
        }
        return static_cast<std::size_t>(it - vars_.begin());
    }

    BasicDistribution marginal(const std::vector<std::string> &keep) const {
        std::vector<std::size_t> idx;
        for (const auto &k : keep) {
            idx.push_back(index_of(k));
        }
        BasicDistribution r(keep);
        Outcome o(keep.size());
        for (const auto &[full, p] : probs_) {
            for (std::size_t i = 0; i < idx.size(); i++) {
                o[i] = full[idx[i]];
            }
            r.add(o, p);
        }
        return r;
    }

    /// Restricts to the event `given` and renormalizes; the conditioned
    /// variables are dropped from the result.
    BasicDistribution condition(const Given &given) const {
        std::vector<std::pair<std::size_t, std::int64_t>> fixed;
        std::vector<bool> drop(vars_.size(), false);
        for (const auto &[name, v] : given) {
            std::size_t i = index_of(name);
            fixed.emplace_back(i, v);
            drop[i] = true;
        }
        std::vector<std::string> rest;
        for (std::size_t i = 0; i < vars_.size(); i++) {
            if (!drop[i]) {
                rest.push_back(vars_[i]);
            }
        }
        BasicDistribution r(rest);
        P mass = 0;
        Outcome o;
        for (const auto &[full, p] : probs_) {
            bool ok = true;
            for (const auto &[i, v] : fixed) {
                if (full[i] != v) {
                    ok = false;
                    break;
                }
            }
            if (!ok) {
                continue;
            }
            o.clear();
            for (std::size_t i = 0; i < vars_.size(); i++) {
                if (!drop[i]) {
                    o.push_back(full[i]);
                }
            }
            r.add(o, p);
            mass += p;
        }
        if (mass == 0) {
            throw ZeroProbabilityEvent("conditioning on an event of probability zero");
        }
        for (auto &[k, p] : r.probs_) {
            p /= mass;
        }
        return r;
    }

    BasicDistribution normalized() const {
        P t = total();
        if (t == 0) {
            throw ZeroProbabilityEvent("normalizing an empty distribution");
        }
        BasicDistribution r(vars_);
        for (const auto &[o, p] : probs_) {
            r.probs_.emplace(o, p / t);
        }
        return r;
    }

    /// Independent product; variable names must be disjoint.
    BasicDistribution product(const BasicDistribution &other) const {
        std::vector<std::string> names = vars_;
        for (const auto &v : other.vars_) {
            if (std::find(vars_.begin(), vars_.end(), v) != vars_.end()) {
                throw SupportMismatch("product of distributions sharing variable " + v);
            }
            names.push_back(v);
        }
        BasicDistribution r(names);
        for (const auto &[o1, p1] : probs_) {
            for (const auto &[o2, p2] : other.probs_) {
                Outcome o = o1;
                o.insert(o.end(), o2.begin(), o2.end());
                r.add(o, p1 * p2);
            }
        }
        return r;
    }

    /// Pushforward under a deterministic map.
    template <class F>
    BasicDistribution transform(std::vector<std::string> new_vars, F f) const {
        BasicDistribution r(std::move(new_vars));
        for (const auto &[o, p] : probs_) {
            r.add(f(o), p);
        }
        return r;
    }

   private:
    std::vector<std::string> vars_;
    std::map<Outcome, P> probs_;
};

using Distribution = BasicDistribution<double>;
using ExactDistribution = BasicDistribution<Rational>;

inline double as_double(double v) {
    return v;
}
inline double as_double(const Rational &v) {
    return to_double(v);
}

template <class P>
P abs_value(const P &v) {
    return v < 0 ? P(-v) : v;
}

/// Sum of absolute differences (twice the total variation distance).
template <class P>
P one_norm(const BasicDistribution<P> &p, const BasicDistribution<P> &q) {
    if (p.vars() != q.vars()) {
        throw SupportMismatch("one_norm: variable lists differ");
    }
    P acc = 0;
    const auto &a = p.entries();
    const auto &b = q.entries();
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && i->first < j->first)) {
            acc += abs_value(i->second);
            ++i;
        } else if (i == a.end() || j->first < i->first) {
            acc += abs_value(j->second);
            ++j;
        } else {
            acc += abs_value(P(i->second - j->second));
            ++i;
            ++j;
        }
    }
    return acc;
}

template <class P>
P max_probability(const BasicDistribution<P> &p) {
    P m = 0;
    for (const auto &[o, v] : p.entries()) {
        if (v > m) {
            m = v;
        }
    }
    return m;
}

template <class P>
double min_entropy(const BasicDistribution<P> &p) {
    P t = p.total();
    if (t == 0) {
        throw ZeroProbabilityEvent("min_entropy of an empty distribution");
    }
    return -std::log2(as_double(max_probability(p)) / as_double(t));
}

template <class P>
double min_entropy_given(const BasicDistribution<P> &joint, const typename BasicDistribution<P>::Given &given) {
    return min_entropy(joint.condition(given));
}

/// True iff Pr(a|c,d) = Pr(a|c) (within tol) for every positive-probability (c,d).
template <class P>
bool is_markov(const BasicDistribution<P> &joint, const std::vector<std::string> &a_vars,
               const std::vector<std::string> &c_vars, const std::vector<std::string> &d_vars, double tol = 1e-12) {
    std::vector<std::string> acd = a_vars;
    acd.insert(acd.end(), c_vars.begin(), c_vars.end());
    acd.insert(acd.end(), d_vars.begin(), d_vars.end());
    std::vector<std::string> ac = a_vars;
    ac.insert(ac.end(), c_vars.begin(), c_vars.end());
    std::vector<std::string> cd = c_vars;
    cd.insert(cd.end(), d_vars.begin(), d_vars.end());
    auto p_acd = joint.marginal(acd);
    auto p_ac = joint.marginal(ac);
    auto p_cd = joint.marginal(cd);
    auto p_c = joint.marginal(c_vars);
    auto p_a = joint.marginal(a_vars);
    std::size_t nc = c_vars.size();
    // Compare p(a,c,d) p(c) with p(a,c) p(c,d) over all a in the support of A.
    for (const auto &[cd_o, pcd] : p_cd.entries()) {
        typename BasicDistribution<P>::Outcome c_o(cd_o.begin(), cd_o.begin() + static_cast<long>(nc));
        P pc = p_c.prob(c_o);
        for (const auto &[a_o, pa] : p_a.entries()) {
            typename BasicDistribution<P>::Outcome o = a_o;
            o.insert(o.end(), cd_o.begin(), cd_o.end());
            P lhs = p_acd.prob(o) * pc;
            typename BasicDistribution<P>::Outcome ac_o = a_o;
            ac_o.insert(ac_o.end(), c_o.begin(), c_o.end());
            P rhs = p_ac.prob(ac_o) * pcd;
            double diff = as_double(abs_value(P(lhs - rhs)));
            if (diff > tol * as_double(pc * pcd)) {
                return false;
            }
        }
    }
    return true;
}

/// I(A;D|C) in bits.
template <class P>
double conditional_mutual_information(const BasicDistribution<P> &joint, const std::vector<std::string> &a_vars,
                                      const std::vector<std::string> &d_vars, const std::vector<std::string> &c_vars) {
    auto entropy = [&](const std::vector<std::string> &vs) {
        if (vs.empty()) {
            return 0.0;
        }
        auto m = joint.marginal(vs);
        double t = as_double(m.total());
        double h = 0;
        for (const auto &[o, p] : m.entries()) {
            double q = as_double(p) / t;
            if (q > 0) {
                h -= q * std::log2(q);
            }
        }
        return h;
    };
    auto cat = [](std::vector<std::string> x, const std::vector<std::string> &y) {
        x.insert(x.end(), y.begin(), y.end());
        return x;
    };
    return entropy(cat(a_vars, c_vars)) + entropy(cat(d_vars, c_vars)) - entropy(cat(cat(a_vars, d_vars), c_vars)) -
           entropy(c_vars);
}

}  // namespace msdi
