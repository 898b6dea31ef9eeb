"""Authenticated report exchange.

Every packet carries a MIC: the CBC residue (last ciphertext block, zero IV)
of the packet bytes that precede it. Payloads travel in clear. Freshness comes
from nonces the receiver issues encrypted inside ACKs and expects back,
encrypted, in the next message.

Wire layout (big-endian)::

    [msg_type:1][mn_id:2][payload_len:2][payload][nonce_flag:1][nonce_block?][mic]

A nonce block decrypts to a 2-byte marker (``RN`` in messages, ``AK`` in
acknowledgements) followed by the nonce.
"""
from __future__ import annotations

import hmac
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Callable, Protocol

import numpy as np

from .exceptions import LTDPSError

log = logging.getLogger(__name__)

NONCE_MARK = b"RN"
ACK_MARK = b"AK"


class MsgType(IntEnum):
    REPORT = 0x01
    ACK = 0x02
    SERVER_MSG = 0x03


class Verdict(Enum):
    ACCEPTED = "accepted"
    TAMPERED = "tampered"
    REPLAYED = "replayed"


class PacketError(LTDPSError, ValueError):
    """Bytes do not decode to a well-formed packet."""


# -- block ciphers -------------------------------------------------------------

class BlockCipher(Protocol):
    block_size: int
    key_size: int

    def encrypt_block(self, block: bytes, key: bytes) -> bytes: ...

    def decrypt_block(self, block: bytes, key: bytes) -> bytes: ...


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


class XorCipher:
    """E(b, k) = b XOR k. Linear, for hand-checkable MIC arithmetic only."""

    block_size = 8
    key_size = 8

    def encrypt_block(self, block, key):
        return _xor(block, key)

    decrypt_block = encrypt_block


def _xorshift64(state):
    while True:
        state ^= (state << 13) & 0xFFFFFFFFFFFFFFFF
        state ^= state >> 7
        state ^= (state << 17) & 0xFFFFFFFFFFFFFFFF
        yield state


class SubstitutionCipher:
    """Toy 64-bit cipher: round-key XOR, key-derived S-box, 64-bit rotation.

    Not secure. Deterministic and non-linear, which is all the tests need.
    """

    block_size = 8
    key_size = 8
    rounds = 8
    _rot = 19

    def __init__(self):
        self._cache = {}

    def _schedule(self, key):
        sched = self._cache.get(key)
        if sched is None:
            if len(key) != self.key_size:
                raise ValueError(f"key must be {self.key_size} bytes, got {len(key)}")
            prng = _xorshift64(int.from_bytes(key, "big") ^ 0x9E3779B97F4A7C15 or 1)
            sbox = list(range(256))
            for i in range(255, 0, -1):
                j = next(prng) % (i + 1)
                sbox[i], sbox[j] = sbox[j], sbox[i]
            inv = [0] * 256
            for i, v in enumerate(sbox):
                inv[v] = i
            rks = [next(prng) for _ in range(self.rounds)]
            sched = self._cache[key] = (bytes(sbox), bytes(inv), rks)
        return sched

    def encrypt_block(self, block, key):
        sbox, _, rks = self._schedule(key)
        x = int.from_bytes(block, "big")
        for rk in rks:
            x = int.from_bytes(bytes(sbox[b] for b in (x ^ rk).to_bytes(8, "big")), "big")
            x = ((x << self._rot) | (x >> (64 - self._rot))) & 0xFFFFFFFFFFFFFFFF
        return x.to_bytes(8, "big")

    def decrypt_block(self, block, key):
        _, inv, rks = self._schedule(key)
        x = int.from_bytes(block, "big")
        for rk in reversed(rks):
            x = ((x >> self._rot) | (x << (64 - self._rot))) & 0xFFFFFFFFFFFFFFFF
            x = int.from_bytes(bytes(inv[b] for b in x.to_bytes(8, "big")), "big") ^ rk
        return x.to_bytes(8, "big")


class TripleDESCipher:
    """3DES single-block ECB through the ``cryptography`` package."""

    block_size = 8
    key_size = 24

    def _ecb(self, key):
        try:
            from cryptography.hazmat.decrepit.ciphers.algorithms import TripleDES
        except ImportError:  # cryptography < 43
            from cryptography.hazmat.primitives.ciphers.algorithms import TripleDES
        from cryptography.hazmat.primitives.ciphers import Cipher, modes
        return Cipher(TripleDES(key), modes.ECB())

    def encrypt_block(self, block, key):
        enc = self._ecb(key).encryptor()
        return enc.update(block) + enc.finalize()

    def decrypt_block(self, block, key):
        dec = self._ecb(key).decryptor()
        return dec.update(block) + dec.finalize()


DEFAULT_CIPHER = SubstitutionCipher()


def compute_mic(message: bytes, key: bytes, cipher: BlockCipher = DEFAULT_CIPHER) -> bytes:
    """CBC residue of the zero-padded message under a zero IV."""
    bs = cipher.block_size
    if not message or len(message) % bs:
        message = message + b"\x00" * (bs - len(message) % bs)
    chain = b"\x00" * bs
    for i in range(0, len(message), bs):
        chain = cipher.encrypt_block(_xor(chain, message[i:i + bs]), key)
    return chain


# -- packets ---------------------------------------------------------------------

@dataclass(frozen=True)
class SecurePacket:
    msg_type: int
    mn_id: int
    payload: bytes
    nonce_block: bytes | None
    mic: bytes

    def prefix(self) -> bytes:
        """Every byte the MIC covers."""
        if len(self.payload) > 0xFFFF:
            raise PacketError("payload longer than 65535 bytes")
        head = bytes([self.msg_type]) + self.mn_id.to_bytes(2, "big") + len(self.payload).to_bytes(2, "big")
        tail = b"\x01" + self.nonce_block if self.nonce_block is not None else b"\x00"
        return head + self.payload + tail

    def encode(self) -> bytes:
        return self.prefix() + self.mic

    @classmethod
    def decode(cls, data: bytes, block_size: int = 8) -> "SecurePacket":
        data = bytes(data)
        if len(data) < 6 + block_size:
            raise PacketError("packet too short")
        msg_type = data[0]
        if msg_type not in MsgType._value2member_map_:
            raise PacketError(f"unknown message type {msg_type:#04x}")
        mn_id = int.from_bytes(data[1:3], "big")
        n = int.from_bytes(data[3:5], "big")
        pos = 5 + n
        if pos >= len(data):
            raise PacketError("payload length runs past the packet")
        payload, flag = data[5:pos], data[pos]
        pos += 1
        nonce_block = None
        if flag == 1:
            nonce_block, pos = data[pos:pos + block_size], pos + block_size
        elif flag != 0:
            raise PacketError(f"bad nonce flag {flag}")
        if len(data) != pos + block_size:
            raise PacketError("packet length does not match its header")
        return cls(msg_type, mn_id, payload, nonce_block, data[pos:])


def seal(msg_type: int, mn_id: int, payload: bytes, key: bytes, nonce: bytes | None = None,
         cipher: BlockCipher = DEFAULT_CIPHER, marker: bytes = NONCE_MARK) -> SecurePacket:
    nonce_block = None
    if nonce is not None:
        nonce_block = cipher.encrypt_block(marker + nonce, key)
    draft = SecurePacket(int(msg_type), mn_id, bytes(payload), nonce_block, b"")
    return SecurePacket(draft.msg_type, mn_id, draft.payload, nonce_block,
                        compute_mic(draft.prefix(), key, cipher))


class NonceState:
    """Receiver-side freshness.

    ``outstanding`` holds the nonce the peer's next report must echo.
    ``pending_acks`` holds nonces of server messages still waiting for their ACK;
    several can be in flight at once.
    """

    def __init__(self, window: int = 4096):
        self.window = window
        self.outstanding: dict[int, bytes] = {}
        self.pending_acks: dict[int, set[bytes]] = {}
        self.used: dict[int, deque] = {}
        self.opened: set[int] = set()

    def issue(self, mn_id: int, rng: np.random.Generator, size: int, ack: bool = False) -> bytes:
        used = self.used.setdefault(mn_id, deque(maxlen=self.window))
        pending = self.pending_acks.setdefault(mn_id, set())
        while True:
            nonce = rng.bytes(size)
            if nonce not in used and nonce not in pending and nonce != self.outstanding.get(mn_id):
                break
        if ack:
            pending.add(nonce)
        else:
            self.outstanding[mn_id] = nonce
        return nonce

    def consume(self, mn_id: int, nonce: bytes, ack: bool = False) -> bool:
        used = self.used.setdefault(mn_id, deque(maxlen=self.window))
        if nonce in used:
            return False
        if ack:
            pending = self.pending_acks.get(mn_id, set())
            if nonce not in pending:
                return False
            pending.discard(nonce)
        else:
            if nonce != self.outstanding.get(mn_id):
                return False
            del self.outstanding[mn_id]
        used.append(nonce)
        return True


def _as_packet(packet, block_size):
    if isinstance(packet, SecurePacket):
        return packet
    return SecurePacket.decode(packet, block_size)


def verify(packet, key: bytes, nonces: NonceState,
           cipher: BlockCipher = DEFAULT_CIPHER) -> Verdict:
    """MIC first, then freshness.

    A nonce-less report is only fresh as the opening message of an exchange;
    any other packet must echo the receiver's outstanding nonce exactly once.
    """
    try:
        pkt = _as_packet(packet, cipher.block_size)
    except PacketError:
        return Verdict.TAMPERED
    if not hmac.compare_digest(compute_mic(pkt.prefix(), key, cipher), pkt.mic):
        return Verdict.TAMPERED
    if pkt.nonce_block is None:
        if pkt.msg_type != MsgType.REPORT or pkt.mn_id in nonces.opened:
            return Verdict.REPLAYED
        nonces.opened.add(pkt.mn_id)
        return Verdict.ACCEPTED
    plain = cipher.decrypt_block(pkt.nonce_block, key)
    marker = ACK_MARK if pkt.msg_type == MsgType.ACK else NONCE_MARK
    if plain[:2] != marker:
        return Verdict.TAMPERED
    if not nonces.consume(pkt.mn_id, plain[2:], ack=pkt.msg_type == MsgType.ACK):
        return Verdict.REPLAYED
    nonces.opened.add(pkt.mn_id)
    return Verdict.ACCEPTED


def make_ack(mn_id: int, key: bytes, nonces: NonceState, rng: np.random.Generator,
             cipher: BlockCipher = DEFAULT_CIPHER) -> SecurePacket:
    """(ACK + fresh nonce) encrypted under the shared key; the nonce becomes outstanding."""
    nonce = nonces.issue(mn_id, rng, cipher.block_size - len(ACK_MARK))
    return seal(MsgType.ACK, mn_id, b"", key, nonce, cipher, marker=ACK_MARK)


def open_nonce(packet: SecurePacket, key: bytes, marker: bytes,
               cipher: BlockCipher = DEFAULT_CIPHER) -> bytes | None:
    """Check MIC and marker; return the carried nonce or None."""
    if packet.nonce_block is None:
        return None
    if not hmac.compare_digest(compute_mic(packet.prefix(), key, cipher), packet.mic):
        return None
    plain = cipher.decrypt_block(packet.nonce_block, key)
    return plain[2:] if plain[:2] == marker else None


# -- endpoints and handshakes ------------------------------------------------------

class MobileNodeEndpoint:
    def __init__(self, mn_id: int, key: bytes, cipher: BlockCipher = DEFAULT_CIPHER):
        self.mn_id = mn_id
        self.key = key
        self.cipher = cipher
        self.next_nonce: bytes | None = None
        self.seen: set[bytes] = set()

    def send(self, payload: bytes) -> SecurePacket:
        pkt = seal(MsgType.REPORT, self.mn_id, payload, self.key, self.next_nonce, self.cipher)
        self.next_nonce = None
        return pkt

    def receive_ack(self, data) -> Verdict:
        try:
            pkt = _as_packet(data, self.cipher.block_size)
        except PacketError:
            return Verdict.TAMPERED
        if pkt.msg_type != MsgType.ACK or pkt.mn_id != self.mn_id:
            return Verdict.TAMPERED
        nonce = open_nonce(pkt, self.key, ACK_MARK, self.cipher)
        if nonce is None:
            return Verdict.TAMPERED
        if nonce in self.seen:
            return Verdict.REPLAYED
        self.seen.add(nonce)
        self.next_nonce = nonce
        return Verdict.ACCEPTED

    def receive_server_message(self, data) -> tuple[Verdict, SecurePacket | None]:
        """Verify a server-initiated message and answer with (ACK + its nonce)."""
        try:
            pkt = _as_packet(data, self.cipher.block_size)
        except PacketError:
            return Verdict.TAMPERED, None
        if pkt.msg_type != MsgType.SERVER_MSG or pkt.mn_id != self.mn_id:
            return Verdict.TAMPERED, None
        nonce = open_nonce(pkt, self.key, NONCE_MARK, self.cipher)
        if nonce is None:
            return Verdict.TAMPERED, None
        if nonce in self.seen:
            return Verdict.REPLAYED, None
        self.seen.add(nonce)
        ack = seal(MsgType.ACK, self.mn_id, b"", self.key, nonce, self.cipher, marker=ACK_MARK)
        return Verdict.ACCEPTED, ack


class ServerEndpoint:
    """MPPS side. ``keys`` maps MN id to its pre-shared key."""

    def __init__(self, keys: dict[int, bytes], cipher: BlockCipher = DEFAULT_CIPHER,
                 rng: np.random.Generator | None = None):
        self.keys = keys
        self.cipher = cipher
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.nonces = NonceState()

    def receive(self, data) -> tuple[Verdict, SecurePacket | None]:
        try:
            pkt = _as_packet(data, self.cipher.block_size)
        except PacketError:
            return Verdict.TAMPERED, None
        key = self.keys.get(pkt.mn_id)
        if key is None:
            return Verdict.TAMPERED, None
        verdict = verify(pkt, key, self.nonces, self.cipher)
        if verdict is not Verdict.ACCEPTED:
            log.warning("alarm: %s packet from MN %d refused", verdict.value, pkt.mn_id)
        return verdict, pkt

    def make_ack(self, mn_id: int) -> SecurePacket:
        return make_ack(mn_id, self.keys[mn_id], self.nonces, self.rng, self.cipher)

    def send_message(self, mn_id: int, payload: bytes) -> SecurePacket:
        nonce = self.nonces.issue(mn_id, self.rng, self.cipher.block_size - len(NONCE_MARK), ack=True)
        return seal(MsgType.SERVER_MSG, mn_id, payload, self.keys[mn_id], nonce, self.cipher)


@dataclass
class TranscriptEntry:
    sender: str
    label: str
    data: bytes
    verdict: Verdict

    def __str__(self):
        return f"{self.sender:<9} {self.label:<10} {self.verdict.value:<8} {self.data.hex()}"


@dataclass
class Transcript:
    entries: list[TranscriptEntry] = field(default_factory=list)
    aborted: bool = False

    @property
    def verdicts(self) -> list[Verdict]:
        return [e.verdict for e in self.entries]

    def __str__(self):
        lines = [str(e) for e in self.entries]
        if self.aborted:
            lines.append("ALARM: exchange aborted")
        return "\n".join(lines)


Adversary = Callable[[str, bytes], bytes]


def run_handshake(mn: MobileNodeEndpoint, server: ServerEndpoint, messages: list[bytes],
                  adversary: Adversary | None = None, replay: bool = False) -> Transcript:
    """MN-initiated exchange: each message is answered by an encrypted ACK + nonce.

    Two messages give the four-packet sequence. ``adversary`` may rewrite any
    packet in flight (it receives the packet label); ``replay`` re-sends the
    last MN packet after the exchange.
    """
    tr = Transcript()
    relay = adversary or (lambda label, data: data)
    last = None
    for k, msg in enumerate(messages, start=1):
        data = relay(f"Message_{k}", mn.send(msg).encode())
        verdict, _ = server.receive(data)
        tr.entries.append(TranscriptEntry("MN→MPPS", f"Message_{k}", data, verdict))
        if verdict is not Verdict.ACCEPTED:
            tr.aborted = True
            return tr
        last = data
        ack = relay(f"ACK_{k}", server.make_ack(mn.mn_id).encode())
        verdict = mn.receive_ack(ack)
        tr.entries.append(TranscriptEntry("MPPS→MN", f"ACK_{k}", ack, verdict))
        if verdict is not Verdict.ACCEPTED:
            log.warning("alarm: MN %d refused %s ACK", mn.mn_id, verdict.value)
            tr.aborted = True
            return tr
    if replay and last is not None:
        verdict, _ = server.receive(last)
        tr.entries.append(TranscriptEntry("MN→MPPS", "replay", last, verdict))
        tr.aborted = verdict is not Verdict.ACCEPTED
    return tr


def run_server_handshake(server: ServerEndpoint, mn: MobileNodeEndpoint, message: bytes,
                         adversary: Adversary | None = None) -> Transcript:
    """Server-initiated pair: message + encrypted nonce + MIC, answered by (ACK + nonce)."""
    tr = Transcript()
    relay = adversary or (lambda label, data: data)
    data = relay("Message", server.send_message(mn.mn_id, message).encode())
    verdict, ack = mn.receive_server_message(data)
    tr.entries.append(TranscriptEntry("MPPS→MN", "Message", data, verdict))
    if ack is None:
        tr.aborted = True
        return tr
    ack_data = relay("ACK", ack.encode())
    verdict, _ = server.receive(ack_data)
    tr.entries.append(TranscriptEntry("MN→MPPS", "ACK", ack_data, verdict))
    tr.aborted = verdict is not Verdict.ACCEPTED
    return tr
