//! Cards, card sets and the 40-card Italian deck.
//!
//! A card is stored as an index `0..40` laid out as `suit * 10 + (rank - 1)`,
//! which lets a whole hand, table or pile live in the low 40 bits of a `u64`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

pub const DECK_SIZE: usize = 40;
pub const HAND_SIZE: usize = 9;

/// Italian suits with their fixed French counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Suit {
    /// Denari, ♦
    Coins = 0,
    /// Spade, ♠
    Swords = 1,
    /// Coppe, ♥
    Cups = 2,
    /// Bastoni, ♣
    Batons = 3,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Coins, Suit::Swords, Suit::Cups, Suit::Batons];

    pub fn letter(self) -> char {
        match self {
            Suit::Coins => 'd',
            Suit::Swords => 's',
            Suit::Cups => 'h',
            Suit::Batons => 'c',
        }
    }

    pub fn from_letter(c: char) -> Option<Suit> {
        match c {
            'd' => Some(Suit::Coins),
            's' => Some(Suit::Swords),
            'h' => Some(Suit::Cups),
            'c' => Some(Suit::Batons),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Suit::Coins => '♦',
            Suit::Swords => '♠',
            Suit::Cups => '♥',
            Suit::Batons => '♣',
        }
    }

    fn from_index(i: u8) -> Suit {
        Suit::ALL[i as usize]
    }
}

/// A single card. Ordering is the canonical card order used for tie-breaks
/// (suit-major, then rank).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card(u8);

impl Card {
    /// `rank` is 1..=10 (1 = ace, 8 = knave, 9 = horse, 10 = king).
    pub fn new(rank: u8, suit: Suit) -> Result<Card, ParseError> {
        if !(1..=10).contains(&rank) {
            return Err(ParseError::Rank(rank));
        }
        Ok(Card(suit as u8 * 10 + rank - 1))
    }

    pub const fn from_index(index: u8) -> Card {
        assert!(index < 40);
        Card(index)
    }

    #[inline]
    pub const fn index(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn rank(self) -> u8 {
        self.0 % 10 + 1
    }

    #[inline]
    pub fn suit(self) -> Suit {
        Suit::from_index(self.0 / 10)
    }

    #[inline]
    pub const fn is_coin(self) -> bool {
        self.0 < 10
    }

    #[inline]
    pub const fn bit(self) -> u64 {
        1u64 << self.0
    }

    /// Value used to compute the primiera.
    #[inline]
    pub const fn primiera_value(self) -> u32 {
        PRIMIERA_BY_RANK[self.rank() as usize]
    }

    fn rank_symbol(self) -> char {
        match self.rank() {
            1 => 'A',
            8 => 'J',
            9 => 'Q',
            10 => 'K',
            r => (b'0' + r) as char,
        }
    }

    /// Human-facing form with the French suit symbol, e.g. `7♦`.
    pub fn pretty(self) -> String {
        format!("{}{}", self.rank_symbol(), self.suit().symbol())
    }
}

pub const SETTEBELLO: Card = Card(6);

/// Primiera values indexed by rank (index 0 unused).
const PRIMIERA_BY_RANK: [u32; 11] = [0, 16, 12, 13, 14, 15, 18, 21, 10, 10, 10];

/// Primiera value of a card.
pub fn primiera_value(card: Card) -> u32 {
    card.primiera_value()
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.rank_symbol(), self.suit().letter())
    }
}

impl fmt::Debug for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Card {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Card, ParseError> {
        let mut chars = s.chars();
        let (Some(r), Some(su), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(ParseError::Card(s.to_string()));
        };
        let rank = match r {
            'A' | 'a' | '1' => 1,
            '2'..='7' => r as u8 - b'0',
            'J' | 'j' => 8,
            'Q' | 'q' => 9,
            'K' | 'k' => 10,
            _ => return Err(ParseError::Card(s.to_string())),
        };
        let suit = Suit::from_letter(su).ok_or_else(|| ParseError::Card(s.to_string()))?;
        Card::new(rank, suit)
    }
}

impl Serialize for Card {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Card, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of cards as a 40-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CardSet(u64);

impl CardSet {
    pub const EMPTY: CardSet = CardSet(0);
    pub const FULL: CardSet = CardSet((1u64 << 40) - 1);
    pub const COINS: CardSet = CardSet((1u64 << 10) - 1);

    #[inline]
    pub const fn from_bits(bits: u64) -> CardSet {
        CardSet(bits & Self::FULL.0)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All four cards of a rank.
    #[inline]
    pub const fn of_rank(rank: u8) -> CardSet {
        let b = 1u64 << (rank - 1);
        CardSet(b | b << 10 | b << 20 | b << 30)
    }

    #[inline]
    pub const fn of_suit(suit: Suit) -> CardSet {
        CardSet(((1u64 << 10) - 1) << (suit as u64 * 10))
    }

    #[inline]
    pub const fn single(card: Card) -> CardSet {
        CardSet(card.bit())
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn contains(self, card: Card) -> bool {
        self.0 & card.bit() != 0
    }

    #[inline]
    pub fn insert(&mut self, card: Card) {
        self.0 |= card.bit();
    }

    #[inline]
    pub fn remove(&mut self, card: Card) {
        self.0 &= !card.bit();
    }

    #[inline]
    pub const fn union(self, other: CardSet) -> CardSet {
        CardSet(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: CardSet) -> CardSet {
        CardSet(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: CardSet) -> CardSet {
        CardSet(self.0 & !other.0)
    }

    #[inline]
    pub const fn is_subset(self, other: CardSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: CardSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Sum of ranks of all cards in the set.
    #[inline]
    pub fn rank_sum(self) -> u32 {
        self.iter().map(|c| c.rank() as u32).sum()
    }

    /// Lowest card in canonical order.
    #[inline]
    pub fn first(self) -> Option<Card> {
        if self.0 == 0 {
            None
        } else {
            Some(Card(self.0.trailing_zeros() as u8))
        }
    }

    pub fn iter(self) -> CardSetIter {
        CardSetIter(self.0)
    }

    /// Bitmask of the ranks present (bit `r` set when rank `r` is present).
    #[inline]
    pub fn rank_mask(self) -> u16 {
        let b = self.0;
        let folded = (b | b >> 10 | b >> 20 | b >> 30) & 0x3ff;
        (folded as u16) << 1
    }

    pub fn to_vec(self) -> Vec<Card> {
        self.iter().collect()
    }
}

impl std::ops::BitOr for CardSet {
    type Output = CardSet;
    fn bitor(self, rhs: CardSet) -> CardSet {
        self.union(rhs)
    }
}

impl std::ops::BitAnd for CardSet {
    type Output = CardSet;
    fn bitand(self, rhs: CardSet) -> CardSet {
        self.intersection(rhs)
    }
}

impl std::ops::Sub for CardSet {
    type Output = CardSet;
    fn sub(self, rhs: CardSet) -> CardSet {
        self.difference(rhs)
    }
}

impl FromIterator<Card> for CardSet {
    fn from_iter<I: IntoIterator<Item = Card>>(iter: I) -> CardSet {
        let mut set = CardSet::EMPTY;
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl IntoIterator for CardSet {
    type Item = Card;
    type IntoIter = CardSetIter;
    fn into_iter(self) -> CardSetIter {
        self.iter()
    }
}

pub struct CardSetIter(u64);

impl Iterator for CardSetIter {
    type Item = Card;

    #[inline]
    fn next(&mut self) -> Option<Card> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(Card(i as u8))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for CardSetIter {}

impl fmt::Display for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl FromStr for CardSet {
    type Err = ParseError;

    /// Whitespace- or comma-separated card codes. Duplicates are rejected.
    fn from_str(s: &str) -> Result<CardSet, ParseError> {
        let mut set = CardSet::EMPTY;
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let card: Card = tok.parse()?;
            if set.contains(card) {
                return Err(ParseError::DuplicateCard(card.to_string()));
            }
            set.insert(card);
        }
        Ok(set)
    }
}

impl Serialize for CardSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for CardSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<CardSet, D::Error> {
        let cards = Vec::<Card>::deserialize(d)?;
        Ok(cards.into_iter().collect())
    }
}

/// Seat index. Seat 0 is the eldest hand, play proceeds 0→1→2→3 and seat 3 deals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Seat(u8);

impl Seat {
    pub const ALL: [Seat; 4] = [Seat(0), Seat(1), Seat(2), Seat(3)];
    pub const ELDEST: Seat = Seat(0);
    pub const DEALER: Seat = Seat(3);

    pub fn new(i: u8) -> Result<Seat, ParseError> {
        if i < 4 {
            Ok(Seat(i))
        } else {
            Err(ParseError::Seat(i))
        }
    }

    #[inline]
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// Next seat counterclockwise.
    #[inline]
    pub const fn next(self) -> Seat {
        Seat((self.0 + 1) & 3)
    }

    #[inline]
    pub const fn offset(self, n: u8) -> Seat {
        Seat((self.0 + n) & 3)
    }

    #[inline]
    pub const fn team(self) -> Team {
        if self.0 & 1 == 0 {
            Team::Hand
        } else {
            Team::Deck
        }
    }

    #[inline]
    pub const fn partner(self) -> Seat {
        Seat((self.0 + 2) & 3)
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The dealer's side is the deck team, the other side the hand team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Team {
    Hand = 0,
    Deck = 1,
}

impl Team {
    pub const BOTH: [Team; 2] = [Team::Hand, Team::Deck];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub const fn other(self) -> Team {
        match self {
            Team::Hand => Team::Deck,
            Team::Deck => Team::Hand,
        }
    }
}

/// A full ordered deck.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deck {
    cards: Vec<Card>,
}

impl Deck {
    /// The deck in canonical order.
    pub fn ordered() -> Deck {
        Deck { cards: (0..DECK_SIZE as u8).map(Card).collect() }
    }

    /// Fisher–Yates shuffle of a fresh deck on ChaCha8 stream `stream` of `seed`.
    pub fn shuffled(seed: u64, stream: u64) -> Deck {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut deck = Deck::ordered();
        deck.cards.shuffle(&mut rng);
        deck
    }

    pub fn cards(&self) -> &[Card] {
        &self.cards
    }
}

/// The outcome of dealing: nine cards per seat and four on the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DealResult {
    /// Indexed by play seat (seat 0 is the eldest hand).
    pub hands: [CardSet; 4],
    pub table: CardSet,
    /// Absolute position of the dealer around the physical table.
    pub dealer_seat: u8,
}

impl DealResult {
    pub fn is_valid(&self) -> bool {
        let mut all = self.table;
        if self.table.len() != 4 {
            return false;
        }
        for h in &self.hands {
            if h.len() != HAND_SIZE || !h.is_disjoint(all) {
                return false;
            }
            all = all | *h;
        }
        all == CardSet::FULL
    }

    pub fn kings_on_table(&self) -> usize {
        (self.table & CardSet::of_rank(10)).len()
    }
}

/// Deterministically deals a match.
///
/// Cards go out three at a time starting with the eldest hand; after each of
/// the first two passes two cards are turned face up on the table. A table
/// with three or more kings is redealt from the next stream of the seed.
pub fn deal(seed: u64, dealer_seat: u8) -> DealResult {
    let mut stream = 0u64;
    loop {
        let deck = Deck::shuffled(seed, stream);
        let result = deal_from(&deck, dealer_seat);
        if result.kings_on_table() < 3 {
            return result;
        }
        stream += 1;
    }
}

/// Deals a given deck without the redeal check.
pub fn deal_from(deck: &Deck, dealer_seat: u8) -> DealResult {
    let mut hands = [CardSet::EMPTY; 4];
    let mut table = CardSet::EMPTY;
    let mut it = deck.cards.iter().copied();
    for pass in 0..3 {
        for hand in hands.iter_mut() {
            for _ in 0..3 {
                hand.insert(it.next().expect("deck holds 40 cards"));
            }
        }
        if pass < 2 {
            for _ in 0..2 {
                table.insert(it.next().expect("deck holds 40 cards"));
            }
        }
    }
    DealResult { hands, table, dealer_seat: dealer_seat & 3 }
}
