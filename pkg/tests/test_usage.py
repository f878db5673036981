import threading

import pytest

from pricegate import (
    EntityKeyRequired,
    MemoryStore,
    ToggleRouter,
    UnknownLimit,
    UsageTracker,
)
from pricegate.model import Subscription


def sub(plan="GOLD", add_ons=(), sid="u1"):
    return Subscription(subscriber_id=sid, plan_name=plan, add_on_names=frozenset(add_ons))


@pytest.fixture()
def tracker(pricing):
    router = ToggleRouter(pricing)
    return UsageTracker(MemoryStore(), router.current_snapshot)


class CountingStore(MemoryStore):
    def __init__(self):
        super().__init__()
        self.reads = 0

    def counters_for(self, subscriber_id):
        self.reads += 1
        return super().counters_for(subscriber_id)


class TestGetContext:
    def test_fresh_subscriber_all_zero(self, tracker):
        context = tracker.get_context(sub())
        assert context == {"context.userPets": 0, "context.petVisits": 0}

    def test_counters_read_back(self, tracker):
        tracker.try_consume(sub(), "pets per owner", amount=2)
        assert tracker.get_context(sub())["context.userPets"] == 2

    def test_single_store_round_trip(self, pricing):
        store = CountingStore()
        router = ToggleRouter(pricing)
        tracker = UsageTracker(store, router.current_snapshot)
        tracker.get_context(sub())
        assert store.reads == 1

    def test_entity_scope_flattens_to_max(self, tracker):
        # max visits is tracked per pet; the scalar context value is the
        # worst-off entity, so expressions stay conservative
        tracker.try_consume(sub(), "max visits", amount=1, entity_key="rex")
        tracker.try_consume(sub(), "max visits", amount=3, entity_key="milo")
        assert tracker.get_context(sub())["context.petVisits"] == 3


class TestTryConsume:
    def test_grant_and_count(self, tracker):
        result = tracker.try_consume(sub(), "pets per owner")
        assert result.granted is True
        assert result.used == 1
        assert result.max == 4

    def test_denial_at_limit(self, tracker):
        for _ in range(4):
            assert tracker.try_consume(sub(), "pets per owner").granted
        denied = tracker.try_consume(sub(), "pets per owner")
        assert denied.granted is False
        assert denied.used == 4

    def test_never_exceeds_max(self, tracker):
        for _ in range(10):
            tracker.try_consume(sub(), "pets per owner")
        assert tracker.get_context(sub())["context.userPets"] == 4

    def test_amount_respects_boundary(self, tracker):
        assert tracker.try_consume(sub(), "pets per owner", amount=4).granted
        assert not tracker.try_consume(sub(), "pets per owner", amount=1).granted

    def test_oversized_amount_denied_entirely(self, tracker):
        result = tracker.try_consume(sub(), "pets per owner", amount=5)
        assert result.granted is False
        assert result.used == 0  # nothing partially consumed

    def test_add_on_delta_extends_max(self, tracker):
        subscription = sub(add_ons=["smart reports pack"])
        for _ in range(6):  # 4 + 2
            assert tracker.try_consume(
                subscription, "max visits", entity_key="rex"
            ).granted
        assert not tracker.try_consume(
            subscription, "max visits", entity_key="rex"
        ).granted

    def test_entity_keys_tracked_separately(self, tracker):
        for _ in range(4):
            assert tracker.try_consume(sub(), "max visits", entity_key="rex").granted
        assert tracker.try_consume(sub(), "max visits", entity_key="milo").granted

    def test_entity_key_required(self, tracker):
        with pytest.raises(EntityKeyRequired):
            tracker.try_consume(sub(), "max visits")

    def test_unknown_limit(self, tracker):
        with pytest.raises(UnknownLimit):
            tracker.try_consume(sub(), "gremlins")

    def test_non_positive_amount_rejected(self, tracker):
        with pytest.raises(ValueError):
            tracker.try_consume(sub(), "pets per owner", amount=0)

    def test_subscribers_isolated(self, tracker):
        for _ in range(4):
            tracker.try_consume(sub(sid="a"), "pets per owner")
        assert tracker.try_consume(sub(sid="b"), "pets per owner").granted


class TestRelease:
    def test_release_frees_capacity(self, tracker):
        for _ in range(4):
            tracker.try_consume(sub(), "pets per owner")
        tracker.release_usage(sub(), "pets per owner")
        assert tracker.try_consume(sub(), "pets per owner").granted

    def test_release_floors_at_zero(self, tracker):
        tracker.release_usage(sub(), "pets per owner", amount=99)
        assert tracker.get_context(sub())["context.userPets"] == 0


class TestResetPeriod:
    def test_resets_billing_period_counters(self, tracker):
        tracker.try_consume(sub(), "max visits", entity_key="rex")
        tracker.try_consume(sub(), "max visits", entity_key="milo")
        count = tracker.reset_period(sub())
        assert count == 2
        assert tracker.get_context(sub())["context.petVisits"] == 0

    def test_lifetime_counters_survive(self, tracker):
        tracker.try_consume(sub(), "pets per owner")
        tracker.reset_period(sub())
        assert tracker.get_context(sub())["context.userPets"] == 1

    def test_idempotent_second_reset_counts_zeroed(self, tracker):
        tracker.try_consume(sub(), "max visits", entity_key="rex")
        tracker.reset_period(sub())
        assert tracker.reset_period(sub()) == 1  # counter exists, already 0


class TestConcurrency:
    def test_exact_grant_count_under_contention(self, pricing):
        """8 workers x 50 attempts against capacity 100: the store must
        grant exactly 100 and deny the rest, every time."""
        doc_max = 100
        store = MemoryStore()
        granted = []
        lock = threading.Lock()
        start = threading.Barrier(8)

        from pricegate import parse_pricing

        capacity_doc = f"""
name: cap
version: 1
currency: USD
usageLimits:
  - name: slots
    unit: slots
    defaultValue: {doc_max}
features:
  - name: slotting
plans:
  - name: P
    monthlyPrice: 0
"""
        capacity = parse_pricing(capacity_doc)
        router = ToggleRouter(capacity)
        tracker = UsageTracker(store, router.current_snapshot)
        subscription = Subscription(
            subscriber_id="crowd", plan_name="P", add_on_names=frozenset()
        )

        def worker():
            start.wait()
            wins = 0
            for _ in range(50):
                if tracker.try_consume(subscription, "slots").granted:
                    wins += 1
            with lock:
                granted.append(wins)

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert sum(granted) == doc_max
        assert tracker.get_context(subscription)["context.slotsUsed"] == doc_max


class TestHotSwapInteraction:
    def test_lowered_max_denies_existing_usage(self, pricing, pricing_v2):
        router = ToggleRouter(pricing)
        store = MemoryStore()
        tracker = UsageTracker(store, router.current_snapshot)
        platinum = sub("PLATINUM", sid="vip")
        for _ in range(6):
            assert tracker.try_consume(platinum, "pets per owner").granted

        router.swap_pricing(pricing_v2)  # max drops to 4, used is 6
        denied = tracker.try_consume(platinum, "pets per owner")
        assert denied.granted is False
        assert denied.used == 6  # usage is never silently truncated
        assert denied.max == 4

        # and the router reports exhaustion on the next evaluation
        context = tracker.get_context(platinum)
        result = router.evaluate_all(platinum, context=context)
        assert result.statuses["pets per owner"].reason == "LIMIT_EXHAUSTED"
