import asyncio

async def fetch(n):
    await asyncio.sleep(0)
    return n * 2

async def main():
    r = await fetch(3)
    print(r)
