"""State stores for usage counters and subscription records.

Both concerns share one persistence seam so a deployment configures a
single backend. MemoryStore keeps everything behind one process-wide
lock; FileStore adds durability with an append-only JSONL event log
plus a periodic snapshot, replayed on startup.

Counter operations are linearizable per counter key within a process:
compare_and_add performs its read-check-write under the store lock, so
of two racing consumers at max-1 exactly one wins.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Iterable

from pricegate.errors import StoreUnavailable
from pricegate.model import Subscription, utcnow

CounterKey = tuple[str, str | None]  # (limit name, entity key or None)


@dataclass(frozen=True)
class UsageRecord:
    subscriber_id: str
    limit_name: str
    entity_key: str | None
    used: float
    period_start: datetime


def _record_key(subscriber_id: str, limit_name: str, entity_key: str | None):
    return (subscriber_id, limit_name, entity_key)


class MemoryStore:
    """Lock-protected in-memory store. State dies with the process."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counters: dict = {}
        self._subscriptions: dict = {}

    # -- usage counters ------------------------------------------------

    def counters_for(self, subscriber_id: str) -> dict:
        """All counters of one subscriber in a single round trip,
        keyed by (limit name, entity key)."""
        with self._lock:
            return {
                (rec.limit_name, rec.entity_key): rec
                for key, rec in self._counters.items()
                if key[0] == subscriber_id
            }

    def compare_and_add(
        self,
        subscriber_id: str,
        limit_name: str,
        entity_key: str | None,
        amount: float,
        max_value: float,
    ) -> tuple[bool, float]:
        """Atomically add amount unless it would exceed max_value.

        Returns (granted, used after the call). The counter never
        exceeds max_value through this method.
        """
        with self._lock:
            rec = self._get_or_create(subscriber_id, limit_name, entity_key)
            if rec.used + amount <= max_value:
                rec = replace(rec, used=rec.used + amount)
                self._counters[_record_key(subscriber_id, limit_name, entity_key)] = rec
                self._log_consume(subscriber_id, limit_name, entity_key, amount)
                return True, rec.used
            return False, rec.used

    def release(
        self, subscriber_id: str, limit_name: str, entity_key: str | None, amount: float
    ) -> float:
        """Subtract amount from the counter, flooring at 0."""
        with self._lock:
            rec = self._get_or_create(subscriber_id, limit_name, entity_key)
            rec = replace(rec, used=max(0, rec.used - amount))
            self._counters[_record_key(subscriber_id, limit_name, entity_key)] = rec
            self._log_release(subscriber_id, limit_name, entity_key, amount)
            return rec.used

    def reset_period(
        self, subscriber_id: str, limit_names: Iterable[str], now: datetime
    ) -> int:
        """Zero every existing counter of the subscriber whose limit is
        in limit_names; returns how many counters were reset."""
        names = set(limit_names)
        count = 0
        with self._lock:
            for key, rec in list(self._counters.items()):
                if key[0] == subscriber_id and rec.limit_name in names:
                    self._counters[key] = replace(rec, used=0, period_start=now)
                    count += 1
            if count:
                self._log_reset(subscriber_id, sorted(names), now)
        return count

    def _get_or_create(
        self, subscriber_id: str, limit_name: str, entity_key: str | None
    ) -> UsageRecord:
        key = _record_key(subscriber_id, limit_name, entity_key)
        rec = self._counters.get(key)
        if rec is None:
            rec = UsageRecord(subscriber_id, limit_name, entity_key, 0, utcnow())
            self._counters[key] = rec
        return rec

    # -- subscriptions ---------------------------------------------------

    def put_subscription(self, subscription: Subscription) -> None:
        with self._lock:
            self._subscriptions[subscription.subscriber_id] = subscription
            self._log_subscription_put(subscription)

    def get_subscription(self, subscriber_id: str) -> Subscription | None:
        with self._lock:
            return self._subscriptions.get(subscriber_id)

    def delete_subscription(self, subscriber_id: str) -> bool:
        with self._lock:
            existed = subscriber_id in self._subscriptions
            if existed:
                del self._subscriptions[subscriber_id]
                self._log_subscription_delete(subscriber_id)
            return existed

    def list_subscriptions(self) -> list[Subscription]:
        with self._lock:
            return sorted(self._subscriptions.values(), key=lambda s: s.subscriber_id)

    # -- persistence hooks (no-ops in memory) ----------------------------

    def _log_consume(self, subscriber_id, limit_name, entity_key, amount) -> None:
        pass

    def _log_release(self, subscriber_id, limit_name, entity_key, amount) -> None:
        pass

    def _log_reset(self, subscriber_id, limit_names, now) -> None:
        pass

    def _log_subscription_put(self, subscription) -> None:
        pass

    def _log_subscription_delete(self, subscriber_id) -> None:
        pass


LOG_FILE = "usage.log"
SNAPSHOT_FILE = "usage.snapshot.json"


def _iso(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def _parse_iso(text: str) -> datetime:
    return datetime.fromisoformat(text)


def _subscription_to_dict(sub: Subscription) -> dict:
    return {
        "subscriberId": sub.subscriber_id,
        "plan": sub.plan_name,
        "addOns": sorted(sub.add_on_names),
        "startedAt": _iso(sub.started_at),
        "periodStart": _iso(sub.period_start),
    }


def _subscription_from_dict(data: dict) -> Subscription:
    return Subscription(
        subscriber_id=data["subscriberId"],
        plan_name=data["plan"],
        add_on_names=frozenset(data.get("addOns", [])),
        started_at=_parse_iso(data["startedAt"]),
        period_start=_parse_iso(data["periodStart"]),
    )


class FileStore(MemoryStore):
    """Durable store: append-only event log plus periodic snapshots.

    Every granted consume, release, reset and subscription write is
    appended to usage.log as one JSON line. Every snapshot_every events
    the full state is written to usage.snapshot.json and the log is
    truncated. Startup loads the snapshot (if any) and replays the log,
    tolerating a truncated final line from a crashed writer.

    fsync="always" flushes the OS buffers after every append, trading
    throughput for durability; "never" leaves flushing to the OS.
    """

    def __init__(self, directory: str, fsync: str = "always", snapshot_every: int = 100) -> None:
        super().__init__()
        if fsync not in ("always", "never"):
            raise ValueError(f"fsync must be 'always' or 'never', got {fsync!r}")
        self._dir = directory
        self._fsync = fsync == "always"
        self._snapshot_every = max(1, snapshot_every)
        self._events_since_snapshot = 0
        self._log = None
        try:
            os.makedirs(directory, exist_ok=True)
            self._load()
            self._log = open(
                os.path.join(directory, LOG_FILE), "a", encoding="utf-8"
            )
        except OSError as exc:
            raise StoreUnavailable(f"cannot open store at {directory}: {exc}") from exc

    def close(self) -> None:
        if self._log is not None:
            self._log.close()
            self._log = None

    # -- recovery --------------------------------------------------------

    def _load(self) -> None:
        snapshot_path = os.path.join(self._dir, SNAPSHOT_FILE)
        if os.path.exists(snapshot_path):
            with open(snapshot_path, encoding="utf-8") as fh:
                data = json.load(fh)
            for entry in data.get("counters", []):
                rec = UsageRecord(
                    subscriber_id=entry["sub"],
                    limit_name=entry["limit"],
                    entity_key=entry.get("entity"),
                    used=entry["used"],
                    period_start=_parse_iso(entry["periodStart"]),
                )
                self._counters[
                    _record_key(rec.subscriber_id, rec.limit_name, rec.entity_key)
                ] = rec
            for entry in data.get("subscriptions", []):
                sub = _subscription_from_dict(entry)
                self._subscriptions[sub.subscriber_id] = sub
        log_path = os.path.join(self._dir, LOG_FILE)
        if os.path.exists(log_path):
            with open(log_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        event = json.loads(line)
                    except json.JSONDecodeError:
                        # Torn final write from a crash; everything
                        # before it already replayed.
                        break
                    self._apply(event)

    def _apply(self, event: dict) -> None:
        op = event.get("op")
        if op == "consume":
            key = _record_key(event["sub"], event["limit"], event.get("entity"))
            rec = self._counters.get(key)
            if rec is None:
                rec = UsageRecord(
                    event["sub"], event["limit"], event.get("entity"), 0, utcnow()
                )
            self._counters[key] = replace(rec, used=rec.used + event["amount"])
        elif op == "release":
            key = _record_key(event["sub"], event["limit"], event.get("entity"))
            rec = self._counters.get(key)
            if rec is None:
                rec = UsageRecord(
                    event["sub"], event["limit"], event.get("entity"), 0, utcnow()
                )
            self._counters[key] = replace(rec, used=max(0, rec.used - event["amount"]))
        elif op == "reset":
            names = set(event["limits"])
            when = _parse_iso(event["ts"])
            for key, rec in list(self._counters.items()):
                if key[0] == event["sub"] and rec.limit_name in names:
                    self._counters[key] = replace(rec, used=0, period_start=when)
        elif op == "sub.put":
            sub = _subscription_from_dict(event["record"])
            self._subscriptions[sub.subscriber_id] = sub
        elif op == "sub.del":
            self._subscriptions.pop(event["id"], None)

    # -- event log ---------------------------------------------------------

    def _append(self, event: dict) -> None:
        if self._log is None:
            raise StoreUnavailable("store is closed")
        try:
            self._log.write(json.dumps(event, sort_keys=True) + "\n")
            self._log.flush()
            if self._fsync:
                os.fsync(self._log.fileno())
        except OSError as exc:
            raise StoreUnavailable(f"cannot append to event log: {exc}") from exc
        self._events_since_snapshot += 1
        if self._events_since_snapshot >= self._snapshot_every:
            self._write_snapshot()

    def _write_snapshot(self) -> None:
        data = {
            "counters": [
                {
                    "sub": rec.subscriber_id,
                    "limit": rec.limit_name,
                    "entity": rec.entity_key,
                    "used": rec.used,
                    "periodStart": _iso(rec.period_start),
                }
                for rec in self._counters.values()
            ],
            "subscriptions": [
                _subscription_to_dict(sub) for sub in self._subscriptions.values()
            ],
        }
        snapshot_path = os.path.join(self._dir, SNAPSHOT_FILE)
        tmp_path = snapshot_path + ".tmp"
        try:
            with open(tmp_path, "w", encoding="utf-8") as fh:
                json.dump(data, fh, sort_keys=True)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp_path, snapshot_path)
            # The log's events are folded into the snapshot; start over.
            self._log.close()
            self._log = open(os.path.join(self._dir, LOG_FILE), "w", encoding="utf-8")
        except OSError as exc:
            raise StoreUnavailable(f"cannot write snapshot: {exc}") from exc
        self._events_since_snapshot = 0

    def _log_consume(self, subscriber_id, limit_name, entity_key, amount) -> None:
        self._append(
            {
                "op": "consume",
                "sub": subscriber_id,
                "limit": limit_name,
                "entity": entity_key,
                "amount": amount,
            }
        )

    def _log_release(self, subscriber_id, limit_name, entity_key, amount) -> None:
        self._append(
            {
                "op": "release",
                "sub": subscriber_id,
                "limit": limit_name,
                "entity": entity_key,
                "amount": amount,
            }
        )

    def _log_reset(self, subscriber_id, limit_names, now) -> None:
        self._append(
            {"op": "reset", "sub": subscriber_id, "limits": list(limit_names), "ts": _iso(now)}
        )

    def _log_subscription_put(self, subscription) -> None:
        self._append({"op": "sub.put", "record": _subscription_to_dict(subscription)})

    def _log_subscription_delete(self, subscriber_id) -> None:
        self._append({"op": "sub.del", "id": subscriber_id})
