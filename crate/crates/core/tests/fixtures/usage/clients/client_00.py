from shop.pricing import price, discount, tax, round_total, format_price
from shop.cart import Cart, checkout, refund, merge_carts

tax(7, region='US', reduced=False)
format_price(2, symbol='£', spaces=False)
c = Cart('ann', capacity=20, strict=True)
c.total()
c.total()
checkout(c, method='invoice', express=True)
