#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#

import os

import aiofiles


class Dumper:
    """Writes report text to a file, creating parent directories."""

    def __init__(self, dump_file_path: str):
        self.dump_file_path: str = dump_file_path
        self._file = None

    async def start(self):
        if self._file:
            return

        parent = os.path.dirname(self.dump_file_path)
        if parent:
            os.makedirs(parent, exist_ok=True)

        self._file = await aiofiles.open(
            self.dump_file_path, mode="w", encoding="utf-8"
        )

    async def stop(self):
        if self._file:
            await self._file.close()
            self._file = None

    async def push_text(self, data: str):
        if not self._file:
            raise RuntimeError(
                "Dumper for {} is not opened. Please start the Dumper first.".format(
                    self.dump_file_path
                )
            )
        _ = await self._file.write(data)


async def dump_text(path: str, data: str) -> None:
    dumper = Dumper(path)
    await dumper.start()
    try:
        await dumper.push_text(data)
    finally:
        await dumper.stop()
