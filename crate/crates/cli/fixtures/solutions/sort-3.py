import sys, time

data = sys.stdin.read().split()
pos = 0
while pos < len(data):
    n = int(data[pos]); pos += 1
    arr = sorted(int(v) for v in data[pos:pos + n]); pos += n
    time.sleep(0.02)
    print(" ".join(map(str, arr)))
