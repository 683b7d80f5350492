#!/usr/bin/env python3
"""Regenerate maps/two_room.map: a kitchen/living-room style layout.

Two rooms split by a wall with a doorway; the start sits in the open
part of the right room, the goal in front of the counter in the left
room.  Coordinates are meters; resolution 0.25 m/cell.
"""

import os

import numpy as np

W, H = 44, 28  # 11 m x 7 m at 0.25 m/cell
RES = 0.25


def build() -> np.ndarray:
    occ = np.zeros((H, W), dtype=bool)
    occ[0, :] = occ[-1, :] = True
    occ[:, 0] = occ[:, -1] = True
    # dividing wall with a doorway (y cells 11..15 open, 1.25 m)
    occ[:, 22] = True
    occ[11:16, 22] = False
    # living-room table (right room)
    occ[15:19, 30:35] = True
    # kitchen counter along the top-left, fridge nook at its right end
    occ[24:27, 2:17] = True
    # small island in the kitchen
    occ[8:11, 8:13] = True
    return occ


def main():
    occ = build()
    lines = [f"{W} {H} {RES:g} 0 0"]
    for y in range(H):
        lines.append("".join("#" if occ[y, x] else "." for x in range(W)))
    out = os.path.join(os.path.dirname(__file__), "..", "maps", "two_room.map")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {os.path.normpath(out)}")


if __name__ == "__main__":
    main()
