#ifndef PBFORGE_GUARD_PBFORGE_CONSTRAINT_DB_HH
#define PBFORGE_GUARD_PBFORGE_CONSTRAINT_DB_HH

#include <pbforge/pbcore.hh>

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace pbforge
{
    /// Live constraints indexed by dense ids. Ids are handed out in increasing order and are
    /// never reused, not even after a snapshot is restored. Inside a snapshot every insertion
    /// and deletion is logged so that restore() can undo them in reverse order.
    class ConstraintDb
    {
    public:
        struct Snapshot
        {
            std::size_t undo_size;
            std::size_t depth;
            std::optional<ConstraintId> contradiction_witness;
        };

        ConstraintDb() = default;
        ConstraintDb(const ConstraintDb &) = delete;
        auto operator=(const ConstraintDb &) -> ConstraintDb & = delete;
        ConstraintDb(ConstraintDb &&) = default;
        auto operator=(ConstraintDb &&) -> ConstraintDb & = default;

        /// Stores c (which must be normalized) under a fresh id. Records the id as the
        /// contradiction witness if c is contradictory and no witness exists yet.
        auto insert(Constraint c) -> ConstraintId;

        /// nullptr unless id is live.
        [[nodiscard]] auto get(ConstraintId id) const -> const Constraint *;
        [[nodiscard]] auto contains(ConstraintId id) const -> bool { return get(id) != nullptr; }

        /// Throws RuleViolation if id is not live.
        auto erase(ConstraintId id) -> void;

        [[nodiscard]] auto next_id() const -> ConstraintId { return _slots.size(); }
        [[nodiscard]] auto live_count() const -> std::size_t { return _live; }
        [[nodiscard]] auto max_live_count() const -> std::size_t { return _max_live; }
        [[nodiscard]] auto contradiction_witness() const -> std::optional<ConstraintId> { return _witness; }

        auto snapshot() -> Snapshot;
        /// Must be called with snapshots in reverse order of creation.
        auto restore(const Snapshot & s) -> void;

        /// Live constraints in increasing id order.
        [[nodiscard]] auto live() const -> std::vector<IdConstraint>;

        template <typename F>
        auto for_each_live(F && f) const -> void
        {
            for (ConstraintId id = 1; id < _slots.size(); ++id)
                if (_slots[id])
                    f(id, *_slots[id]);
        }

    private:
        struct UndoEntry
        {
            ConstraintId id;
            /// Set for deletions (the constraint to reinstate), null for insertions.
            std::unique_ptr<Constraint> removed;
        };

        // Slot 0 is never used so that ids start at 1.
        std::vector<std::unique_ptr<Constraint>> _slots = std::vector<std::unique_ptr<Constraint>>(1);
        std::vector<UndoEntry> _undo;
        std::size_t _depth = 0;
        std::size_t _live = 0;
        std::size_t _max_live = 0;
        std::optional<ConstraintId> _witness;
    };
}

#endif
