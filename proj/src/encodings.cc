#include <pbforge/encodings.hh>
#include <pbforge/errors.hh>

#include <algorithm>
#include <functional>
#include <set>

using std::size_t;
using std::string;
using std::to_string;
using std::vector;

namespace pbforge
{
    namespace
    {
        template <typename... Ts>
        struct Overloaded : Ts...
        {
            using Ts::operator()...;
        };

        auto pos(size_t var) -> Literal { return Literal::positive(static_cast<Variable>(var)); }
        auto neg(size_t var) -> Literal { return Literal::negative(static_cast<Variable>(var)); }

        /// sum(lits) >= degree with unit coefficients. Repeated literals are kept once.
        auto at_least(const vector<Literal> & lits, size_t degree) -> Constraint
        {
            Constraint c;
            std::set<Literal> seen;
            for (const auto & l : lits)
                if (seen.insert(l).second)
                    c.terms.push_back(Term{1, l});
            c.degree = degree;
            return c;
        }

        auto clause(const vector<Literal> & lits) -> Constraint { return at_least(lits, 1); }

        auto require(bool condition, const string & message) -> void
        {
            if (! condition)
                throw InvalidInstance{message};
        }

        auto check_shape(bool condition, const string & message) -> void
        {
            if (! condition)
                throw InvalidWitness{message};
        }

        /// Calls f on every size-k subset of 0..n-1, in lexicographic order.
        auto for_each_subset(size_t n, size_t k, const std::function<void(const vector<size_t> &)> & f) -> void
        {
            if (k > n)
                return;
            vector<size_t> subset(k);
            for (size_t i = 0; i < k; ++i)
                subset[i] = i;
            while (true) {
                f(subset);
                size_t i = k;
                while (i > 0 && subset[i - 1] == n - k + i - 1)
                    --i;
                if (i == 0)
                    return;
                ++subset[i - 1];
                for (size_t j = i; j < k; ++j)
                    subset[j] = subset[j - 1] + 1;
            }
        }

        /// 0-based index of edge {i, j}, i < j, among the edges of K_n in lexicographic order.
        auto edge_index(size_t n, size_t i, size_t j) -> size_t
        {
            return i * n - i * (i + 1) / 2 + (j - i - 1);
        }

        auto finish(Formula f, size_t num_vars, vector<string> comments) -> Formula
        {
            f.declared_vars = num_vars;
            f.declared_constraints = f.constraints.size();
            f.comments = std::move(comments);
            return f;
        }

        auto class_sizes_ok(const vector<size_t> & sizes, size_t n, size_t k) -> bool
        {
            size_t lo = n / k, hi = (n + k - 1) / k;
            return std::all_of(sizes.begin(), sizes.end(), [&](size_t s) { return s >= lo && s <= hi; });
        }
    }

    auto Graph::from_edges(size_t n, vector<std::pair<size_t, size_t>> edges) -> Graph
    {
        Graph g;
        g.n = n;
        for (auto [u, v] : edges) {
            require(u != v, "graph has a self-loop on vertex " + to_string(u));
            require(u < n && v < n, "edge endpoint out of range");
            g.edges.emplace_back(std::min(u, v), std::max(u, v));
        }
        std::sort(g.edges.begin(), g.edges.end());
        g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
        return g;
    }

    auto Graph::adjacency() const -> vector<vector<bool>>
    {
        vector<vector<bool>> adj(n, vector<bool>(n, false));
        for (auto [u, v] : edges)
            adj[u][v] = adj[v][u] = true;
        return adj;
    }

    auto is_prime(size_t p) -> bool
    {
        if (p < 2)
            return false;
        for (size_t d = 2; d * d <= p; ++d)
            if (p % d == 0)
                return false;
        return true;
    }

    auto quadratic_residues(size_t p) -> vector<size_t>
    {
        std::set<size_t> residues;
        for (size_t x = 1; x <= (p - 1) / 2; ++x)
            residues.insert(x * x % p);
        residues.erase(0);
        return {residues.begin(), residues.end()};
    }

    auto paley_graph(size_t p) -> Graph
    {
        require(is_prime(p), "Paley graph needs a prime, got " + to_string(p));
        require(p % 4 == 1, "Paley graph needs p = 1 mod 4, got " + to_string(p));
        auto residues = quadratic_residues(p);
        vector<bool> is_residue(p, false);
        for (auto r : residues)
            is_residue[r] = true;
        Graph g;
        g.n = p;
        for (size_t i = 0; i < p; ++i)
            for (size_t j = i + 1; j < p; ++j)
                if (is_residue[(j - i) % p])
                    g.edges.emplace_back(i, j);
        return g;
    }

    auto complete_multipartite(const vector<size_t> & parts) -> Graph
    {
        vector<size_t> part_of;
        for (size_t i = 0; i < parts.size(); ++i)
            part_of.insert(part_of.end(), parts[i], i);
        Graph g;
        g.n = part_of.size();
        for (size_t u = 0; u < g.n; ++u)
            for (size_t v = u + 1; v < g.n; ++v)
                if (part_of[u] != part_of[v])
                    g.edges.emplace_back(u, v);
        return g;
    }

    auto encode_independent_set(const Graph & g, size_t k) -> Formula
    {
        require(k >= 1 && k <= g.n, "independent set size must be in 1..n");
        Formula f;
        for (auto [u, v] : g.edges)
            f.constraints.push_back(clause({neg(u + 1), neg(v + 1)}));
        vector<Literal> all;
        for (size_t v = 0; v < g.n; ++v)
            all.push_back(pos(v + 1));
        f.constraints.push_back(at_least(all, k));
        return finish(std::move(f), g.n,
            {"family independent-set n=" + to_string(g.n) + " edges=" + to_string(g.edges.size()) + " k=" + to_string(k),
                "index x(v) = v + 1 for vertex v in 0..n-1"});
    }

    auto encode_langford(size_t n) -> Formula
    {
        require(n >= 1, "Langford needs n >= 1");
        size_t positions = 2 * n;
        auto x = [&](size_t k, size_t p) { return (k - 1) * positions + p; };
        Formula f;
        for (size_t k = 1; k <= n; ++k) {
            vector<Literal> here, absent;
            for (size_t p = 1; p <= positions; ++p) {
                here.push_back(pos(x(k, p)));
                absent.push_back(neg(x(k, p)));
            }
            f.constraints.push_back(at_least(here, 2));
            f.constraints.push_back(at_least(absent, positions - 2));
        }
        for (size_t p = 1; p <= positions; ++p)
            for (size_t k = 1; k <= n; ++k)
                for (size_t l = k + 1; l <= n; ++l)
                    f.constraints.push_back(clause({neg(x(k, p)), neg(x(l, p))}));
        for (size_t k = 1; k <= n; ++k)
            for (size_t p = 1; p <= positions; ++p)
                for (size_t q = p + 1; q <= positions; ++q)
                    if (q - p != k + 1)
                        f.constraints.push_back(clause({neg(x(k, p)), neg(x(k, q))}));
        return finish(std::move(f), n * positions,
            {"family langford n=" + to_string(n), "index x(k,p) = (k-1)*2n + p for value k in 1..n at position p in 1..2n"});
    }

    auto encode_schur(size_t n, size_t colors) -> Formula
    {
        require(n >= 2, "Schur needs n >= 2");
        require(colors >= 2, "Schur needs at least 2 colors");
        Formula f;
        if (colors == 2) {
            for (size_t a = 1; a <= n; ++a)
                for (size_t b = a; a + b <= n; ++b) {
                    f.constraints.push_back(clause({neg(a), neg(b), neg(a + b)}));
                    f.constraints.push_back(clause({pos(a), pos(b), pos(a + b)}));
                }
            return finish(std::move(f), n,
                {"family schur n=" + to_string(n) + " colors=2", "index x(e) = e for element e in 1..n; true means color 0"});
        }

        auto x = [&](size_t e, size_t c) { return (e - 1) * colors + c + 1; };
        for (size_t e = 1; e <= n; ++e) {
            vector<Literal> some;
            for (size_t c = 0; c < colors; ++c)
                some.push_back(pos(x(e, c)));
            f.constraints.push_back(clause(some));
        }
        for (size_t a = 1; a <= n; ++a)
            for (size_t b = a; a + b <= n; ++b)
                for (size_t c = 0; c < colors; ++c)
                    f.constraints.push_back(clause({neg(x(a, c)), neg(x(b, c)), neg(x(a + b, c))}));
        return finish(std::move(f), n * colors,
            {"family schur n=" + to_string(n) + " colors=" + to_string(colors),
                "index x(e,c) = (e-1)*colors + c + 1 for element e in 1..n, color c in 0..colors-1"});
    }

    auto encode_vdw(size_t n, size_t colors, size_t ap_length) -> Formula
    {
        require(colors == 2, "van der Waerden encoding supports 2 colors only");
        require(ap_length >= 3 && n >= ap_length, "van der Waerden needs n >= L >= 3");
        Formula f;
        for (size_t d = 1; 1 + (ap_length - 1) * d <= n; ++d)
            for (size_t a = 1; a + (ap_length - 1) * d <= n; ++a) {
                vector<Literal> all_true, all_false;
                for (size_t i = 0; i < ap_length; ++i) {
                    all_true.push_back(neg(a + i * d));
                    all_false.push_back(pos(a + i * d));
                }
                f.constraints.push_back(clause(all_true));
                f.constraints.push_back(clause(all_false));
            }
        return finish(std::move(f), n,
            {"family vdw n=" + to_string(n) + " colors=2 L=" + to_string(ap_length),
                "index x(e) = e for element e in 1..n; true means color 0"});
    }

    auto encode_ramsey(size_t n, size_t s, size_t t) -> Formula
    {
        require(s >= 2 && t >= 2, "Ramsey needs s, t >= 2");
        require(std::max(s, t) >= 3 && n >= std::max(s, t), "Ramsey needs n >= max(s, t) >= 3");
        auto x = [&](size_t i, size_t j) { return edge_index(n, i, j) + 1; };
        Formula f;
        for_each_subset(n, s, [&](const vector<size_t> & sub) {
            vector<Literal> lits;
            for (size_t a = 0; a < sub.size(); ++a)
                for (size_t b = a + 1; b < sub.size(); ++b)
                    lits.push_back(neg(x(sub[a], sub[b])));
            f.constraints.push_back(clause(lits));
        });
        for_each_subset(n, t, [&](const vector<size_t> & sub) {
            vector<Literal> lits;
            for (size_t a = 0; a < sub.size(); ++a)
                for (size_t b = a + 1; b < sub.size(); ++b)
                    lits.push_back(pos(x(sub[a], sub[b])));
            f.constraints.push_back(clause(lits));
        });
        return finish(std::move(f), n * (n - 1) / 2,
            {"family ramsey n=" + to_string(n) + " s=" + to_string(s) + " t=" + to_string(t),
                "index x(i,j) = lexicographic rank of edge {i,j}, i < j in 0..n-1, plus 1; true means the s side"});
    }

    auto encode_equitable(const Graph & g, size_t k) -> Formula
    {
        require(k >= 1 && k <= g.n, "equitable coloring needs 1 <= k <= n");
        size_t n = g.n;
        auto x = [&](size_t v, size_t c) { return v * k + c + 1; };
        Formula f;
        for (size_t v = 0; v < n; ++v) {
            vector<Literal> some;
            for (size_t c = 0; c < k; ++c)
                some.push_back(pos(x(v, c)));
            f.constraints.push_back(clause(some));
            for (size_t c = 0; c < k; ++c)
                for (size_t d = c + 1; d < k; ++d)
                    f.constraints.push_back(clause({neg(x(v, c)), neg(x(v, d))}));
        }
        for (auto [u, v] : g.edges)
            for (size_t c = 0; c < k; ++c)
                f.constraints.push_back(clause({neg(x(u, c)), neg(x(v, c))}));
        for (size_t c = 0; c < k; ++c) {
            vector<Literal> in, out;
            for (size_t v = 0; v < n; ++v) {
                in.push_back(pos(x(v, c)));
                out.push_back(neg(x(v, c)));
            }
            f.constraints.push_back(at_least(in, n / k));
            f.constraints.push_back(at_least(out, n - (n + k - 1) / k));
        }
        return finish(std::move(f), n * k,
            {"family equitable n=" + to_string(n) + " edges=" + to_string(g.edges.size()) + " k=" + to_string(k),
                "index x(v,c) = v*k + c + 1 for vertex v in 0..n-1, color c in 0..k-1"});
    }

    auto encode_php(size_t pigeons, size_t holes) -> Formula
    {
        require(pigeons >= 1 && holes >= 1, "pigeonhole needs at least one pigeon and one hole");
        auto x = [&](size_t p, size_t h) { return (p - 1) * holes + h; };
        Formula f;
        for (size_t p = 1; p <= pigeons; ++p) {
            vector<Literal> some;
            for (size_t h = 1; h <= holes; ++h)
                some.push_back(pos(x(p, h)));
            f.constraints.push_back(clause(some));
        }
        for (size_t h = 1; h <= holes; ++h)
            for (size_t p = 1; p <= pigeons; ++p)
                for (size_t q = p + 1; q <= pigeons; ++q)
                    f.constraints.push_back(clause({neg(x(p, h)), neg(x(q, h))}));
        return finish(std::move(f), pigeons * holes,
            {"family php pigeons=" + to_string(pigeons) + " holes=" + to_string(holes),
                "index x(p,h) = (p-1)*holes + h for pigeon p in 1..m, hole h in 1..n"});
    }

    auto encode_binpacking(const vector<size_t> & sizes, size_t bins, size_t capacity) -> Formula
    {
        require(! sizes.empty(), "bin packing needs at least one item");
        require(bins >= 1 && capacity >= 1, "bin packing needs bins >= 1 and capacity >= 1");
        require(std::all_of(sizes.begin(), sizes.end(), [](size_t s) { return s >= 1; }), "item sizes must be positive");
        auto x = [&](size_t i, size_t j) { return i * bins + j + 1; };
        Formula f;
        for (size_t i = 0; i < sizes.size(); ++i) {
            vector<Literal> some;
            for (size_t j = 0; j < bins; ++j)
                some.push_back(pos(x(i, j)));
            f.constraints.push_back(clause(some));
        }
        Integer total = 0;
        for (auto s : sizes)
            total += s;
        for (size_t j = 0; j < bins; ++j) {
            vector<std::pair<Integer, Literal>> terms;
            for (size_t i = 0; i < sizes.size(); ++i)
                terms.emplace_back(Integer{sizes[i]}, neg(x(i, j)));
            f.constraints.push_back(make_geq(terms, total - capacity));
        }
        string size_list;
        for (auto s : sizes)
            size_list += (size_list.empty() ? "" : ",") + to_string(s);
        return finish(std::move(f), sizes.size() * bins,
            {"family binpacking sizes=" + size_list + " bins=" + to_string(bins) + " cap=" + to_string(capacity),
                "index x(i,j) = i*bins + j + 1 for item i in 0..n-1, bin j in 0..bins-1"});
    }

    auto encode(const ProblemInstance & instance) -> Formula
    {
        return std::visit(
            Overloaded{
                [](const IndependentSet & i) { return encode_independent_set(i.graph, i.k); },
                [](const Langford & i) { return encode_langford(i.n); },
                [](const Schur & i) { return encode_schur(i.n, i.colors); },
                [](const VanDerWaerden & i) { return encode_vdw(i.n, i.colors, i.ap_length); },
                [](const Ramsey & i) { return encode_ramsey(i.n, i.s, i.t); },
                [](const EquitableColoring & i) { return encode_equitable(i.graph, i.k); },
                [](const PigeonHole & i) { return encode_php(i.pigeons, i.holes); },
                [](const BinPacking & i) { return encode_binpacking(i.sizes, i.bins, i.capacity); },
            },
            instance);
    }

    namespace
    {
        auto check_range(const Witness & w, long long lo, long long hi, const string & what) -> void
        {
            for (auto value : w)
                check_shape(value >= lo && value <= hi, what + " " + to_string(value) + " out of range " + to_string(lo) + ".." + to_string(hi));
        }

        auto check_length(const Witness & w, size_t expected, const string & what) -> void
        {
            check_shape(w.size() == expected, "expected " + to_string(expected) + " " + what + ", got " + to_string(w.size()));
        }

        /// No L-term progression inside 1..n (or, for Schur, a + b = c triple) is monochromatic.
        auto progression_free(const Witness & colors, size_t length) -> bool
        {
            size_t n = colors.size();
            for (size_t d = 1; 1 + (length - 1) * d <= n; ++d)
                for (size_t a = 1; a + (length - 1) * d <= n; ++a) {
                    bool same = true;
                    for (size_t i = 1; i < length && same; ++i)
                        same = colors[a + i * d - 1] == colors[a - 1];
                    if (same)
                        return false;
                }
            return true;
        }

        auto sum_free(const Witness & colors) -> bool
        {
            size_t n = colors.size();
            for (size_t a = 1; a <= n; ++a)
                for (size_t b = a; a + b <= n; ++b)
                    if (colors[a - 1] == colors[b - 1] && colors[b - 1] == colors[a + b - 1])
                        return false;
            return true;
        }
    }

    auto verify_witness(const ProblemInstance & instance, const Witness & w) -> bool
    {
        return std::visit(
            Overloaded{
                [&](const IndependentSet & i) {
                    check_range(w, 0, static_cast<long long>(i.graph.n) - 1, "vertex");
                    std::set<long long> chosen(w.begin(), w.end());
                    if (chosen.size() != w.size() || chosen.size() < i.k)
                        return false;
                    for (auto [u, v] : i.graph.edges)
                        if (chosen.contains(static_cast<long long>(u)) && chosen.contains(static_cast<long long>(v)))
                            return false;
                    return true;
                },
                [&](const Langford & i) {
                    check_length(w, 2 * i.n, "sequence values");
                    check_range(w, 1, static_cast<long long>(i.n), "value");
                    for (size_t k = 1; k <= i.n; ++k) {
                        vector<size_t> at;
                        for (size_t p = 0; p < w.size(); ++p)
                            if (w[p] == static_cast<long long>(k))
                                at.push_back(p);
                        if (at.size() != 2 || at[1] - at[0] != k + 1)
                            return false;
                    }
                    return true;
                },
                [&](const Schur & i) {
                    check_length(w, i.n, "colors");
                    check_range(w, 0, static_cast<long long>(i.colors) - 1, "color");
                    return sum_free(w);
                },
                [&](const VanDerWaerden & i) {
                    check_length(w, i.n, "colors");
                    check_range(w, 0, static_cast<long long>(i.colors) - 1, "color");
                    return progression_free(w, i.ap_length);
                },
                [&](const Ramsey & i) {
                    check_length(w, i.n * (i.n - 1) / 2, "edge colors");
                    check_range(w, 0, 1, "edge color");
                    bool ok = true;
                    auto monochromatic = [&](const vector<size_t> & sub, long long color) {
                        for (size_t a = 0; a < sub.size(); ++a)
                            for (size_t b = a + 1; b < sub.size(); ++b)
                                if (w[edge_index(i.n, sub[a], sub[b])] != color)
                                    return false;
                        return true;
                    };
                    for_each_subset(i.n, i.s, [&](const vector<size_t> & sub) { ok = ok && ! monochromatic(sub, 1); });
                    for_each_subset(i.n, i.t, [&](const vector<size_t> & sub) { ok = ok && ! monochromatic(sub, 0); });
                    return ok;
                },
                [&](const EquitableColoring & i) {
                    check_length(w, i.graph.n, "vertex colors");
                    check_range(w, 0, static_cast<long long>(i.k) - 1, "color");
                    for (auto [u, v] : i.graph.edges)
                        if (w[u] == w[v])
                            return false;
                    vector<size_t> sizes(i.k, 0);
                    for (auto c : w)
                        ++sizes[static_cast<size_t>(c)];
                    return class_sizes_ok(sizes, i.graph.n, i.k);
                },
                [&](const PigeonHole & i) {
                    check_length(w, i.pigeons, "holes");
                    check_range(w, 0, static_cast<long long>(i.holes) - 1, "hole");
                    std::set<long long> used(w.begin(), w.end());
                    return used.size() == w.size();
                },
                [&](const BinPacking & i) {
                    check_length(w, i.sizes.size(), "bins");
                    check_range(w, 0, static_cast<long long>(i.bins) - 1, "bin");
                    vector<size_t> load(i.bins, 0);
                    for (size_t item = 0; item < w.size(); ++item)
                        load[static_cast<size_t>(w[item])] += i.sizes[item];
                    return std::all_of(load.begin(), load.end(), [&](size_t l) { return l <= i.capacity; });
                },
            },
            instance);
    }

    auto decode_witness(const ProblemInstance & instance, const Valuation & v) -> Witness
    {
        auto value = [&](size_t var) { return v.get(static_cast<Variable>(var)); };
        // Index of the first true variable among base+0, base+1, ..., base+count-1; 0 if none.
        auto first_true = [&](size_t count, auto var_of) -> long long {
            for (size_t c = 0; c < count; ++c)
                if (value(var_of(c)))
                    return static_cast<long long>(c);
            return 0;
        };
        return std::visit(
            Overloaded{
                [&](const IndependentSet & i) {
                    Witness w;
                    for (size_t u = 0; u < i.graph.n; ++u)
                        if (value(u + 1))
                            w.push_back(static_cast<long long>(u));
                    return w;
                },
                [&](const Langford & i) {
                    Witness w(2 * i.n);
                    for (size_t p = 1; p <= 2 * i.n; ++p)
                        w[p - 1] = 1 + first_true(i.n, [&](size_t k) { return k * 2 * i.n + p; });
                    return w;
                },
                [&](const Schur & i) {
                    Witness w(i.n);
                    for (size_t e = 1; e <= i.n; ++e)
                        w[e - 1] = i.colors == 2 ? (value(e) ? 0 : 1) : first_true(i.colors, [&](size_t c) { return (e - 1) * i.colors + c + 1; });
                    return w;
                },
                [&](const VanDerWaerden & i) {
                    Witness w(i.n);
                    for (size_t e = 1; e <= i.n; ++e)
                        w[e - 1] = value(e) ? 0 : 1;
                    return w;
                },
                [&](const Ramsey & i) {
                    Witness w(i.n * (i.n - 1) / 2);
                    for (size_t e = 0; e < w.size(); ++e)
                        w[e] = value(e + 1) ? 1 : 0;
                    return w;
                },
                [&](const EquitableColoring & i) {
                    Witness w(i.graph.n);
                    for (size_t u = 0; u < i.graph.n; ++u)
                        w[u] = first_true(i.k, [&](size_t c) { return u * i.k + c + 1; });
                    return w;
                },
                [&](const PigeonHole & i) {
                    Witness w(i.pigeons);
                    for (size_t p = 0; p < i.pigeons; ++p)
                        w[p] = first_true(i.holes, [&](size_t h) { return p * i.holes + h + 1; });
                    return w;
                },
                [&](const BinPacking & i) {
                    Witness w(i.sizes.size());
                    for (size_t item = 0; item < w.size(); ++item)
                        w[item] = first_true(i.bins, [&](size_t j) { return item * i.bins + j + 1; });
                    return w;
                },
            },
            instance);
    }

    auto describe(const ProblemInstance & instance) -> string
    {
        return std::visit(
            Overloaded{
                [](const IndependentSet & i) {
                    return "independent-set n=" + to_string(i.graph.n) + " edges=" + to_string(i.graph.edges.size()) + " k=" + to_string(i.k);
                },
                [](const Langford & i) { return "langford n=" + to_string(i.n); },
                [](const Schur & i) { return "schur n=" + to_string(i.n) + " colors=" + to_string(i.colors); },
                [](const VanDerWaerden & i) {
                    return "vdw n=" + to_string(i.n) + " colors=" + to_string(i.colors) + " L=" + to_string(i.ap_length);
                },
                [](const Ramsey & i) { return "ramsey n=" + to_string(i.n) + " s=" + to_string(i.s) + " t=" + to_string(i.t); },
                [](const EquitableColoring & i) {
                    return "equitable n=" + to_string(i.graph.n) + " edges=" + to_string(i.graph.edges.size()) + " k=" + to_string(i.k);
                },
                [](const PigeonHole & i) { return "php pigeons=" + to_string(i.pigeons) + " holes=" + to_string(i.holes); },
                [](const BinPacking & i) {
                    return "binpacking items=" + to_string(i.sizes.size()) + " bins=" + to_string(i.bins) + " cap=" + to_string(i.capacity);
                },
            },
            instance);
    }
}
