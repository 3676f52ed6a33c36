// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifies a source file within one parse session or project.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FileId(pub u32);

/// Byte range into a source file plus the 1-based lines it touches.
///
/// `end` is exclusive. `end_line` is the line holding the last byte of the
/// range (equal to `start_line` for empty spans).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub file: FileId,
    pub start: usize,
    pub end: usize,
    pub start_line: u32,
    pub end_line: u32,
}

impl Span {
    pub fn new(file: FileId, start: usize, end: usize, start_line: u32, end_line: u32) -> Self {
        Span {
            file,
            start,
            end,
            start_line,
            end_line,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        let (start, start_line) = if other.start < self.start {
            (other.start, other.start_line)
        } else {
            (self.start, self.start_line)
        };
        let (end, end_line) = if other.end > self.end {
            (other.end, other.end_line)
        } else {
            (self.end, self.end_line)
        };
        Span {
            file: self.file,
            start,
            end,
            start_line,
            end_line,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Shift the byte range left by `offset` bytes and the lines up by `lines`.
    pub fn rebase(self, offset: usize, lines: u32) -> Span {
        Span {
            file: self.file,
            start: self.start - offset,
            end: self.end - offset,
            start_line: self.start_line - lines,
            end_line: self.end_line - lines,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("span {start}..{end} is outside the source (length {len})")]
pub struct OutOfRange {
    pub start: usize,
    pub end: usize,
    pub len: usize,
}

/// Return the exact source bytes covered by `span`.
pub fn slice_source<'a>(source: &'a str, span: &Span) -> Result<&'a str, OutOfRange> {
    let err = || OutOfRange {
        start: span.start,
        end: span.end,
        len: source.len(),
    };
    if span.start > span.end || span.end > source.len() {
        return Err(err());
    }
    source.get(span.start..span.end).ok_or_else(err)
}

/// 1-based (line, column) of a byte offset; columns count characters.
pub fn line_col(source: &str, offset: usize) -> (u32, u32) {
    let offset = offset.min(source.len());
    let before = &source[..floor_char_boundary(source, offset)];
    let line = before.matches('\n').count() as u32 + 1;
    let col = match before.rfind('\n') {
        Some(nl) => before[nl + 1..].chars().count(),
        None => before.chars().count(),
    } as u32
        + 1;
    (line, col)
}

fn floor_char_boundary(s: &str, mut i: usize) -> usize {
    while i > 0 && !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}
