#include <pbforge/constraint_db.hh>
#include <pbforge/errors.hh>

#include <algorithm>
#include <string>

namespace pbforge
{
    auto ConstraintDb::insert(Constraint c) -> ConstraintId
    {
        ConstraintId id = _slots.size();
        bool contradictory = is_contradiction(c);
        _slots.push_back(std::make_unique<Constraint>(std::move(c)));
        ++_live;
        _max_live = std::max(_max_live, _live);
        if (_depth > 0)
            _undo.push_back(UndoEntry{id, nullptr});
        if (contradictory && ! _witness)
            _witness = id;
        return id;
    }

    auto ConstraintDb::get(ConstraintId id) const -> const Constraint *
    {
        if (id == 0 || id >= _slots.size())
            return nullptr;
        return _slots[id].get();
    }

    auto ConstraintDb::erase(ConstraintId id) -> void
    {
        if (! contains(id))
            throw RuleViolation{"constraint " + std::to_string(id) + " does not exist or was already deleted"};
        auto removed = std::move(_slots[id]);
        --_live;
        if (_depth > 0)
            _undo.push_back(UndoEntry{id, std::move(removed)});
    }

    auto ConstraintDb::snapshot() -> Snapshot
    {
        return Snapshot{_undo.size(), _depth++, _witness};
    }

    auto ConstraintDb::restore(const Snapshot & s) -> void
    {
        while (_undo.size() > s.undo_size) {
            auto & entry = _undo.back();
            if (entry.removed) {
                _slots[entry.id] = std::move(entry.removed);
                ++_live;
            }
            else {
                _slots[entry.id].reset();
                --_live;
            }
            _undo.pop_back();
        }
        _depth = s.depth;
        _witness = s.contradiction_witness;
    }

    auto ConstraintDb::live() const -> std::vector<IdConstraint>
    {
        std::vector<IdConstraint> result;
        result.reserve(_live);
        for_each_live([&](ConstraintId id, const Constraint & c) { result.push_back(IdConstraint{id, &c}); });
        return result;
    }
}
